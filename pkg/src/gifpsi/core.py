"""Intuitionistic fuzzy psi-norms: construction, evaluation and validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import FuzzyConnectives
from .errors import DomainError, ShapeError
from .reports import PASS, AxiomEntry, AxiomReport, SamplerConfig, record_violations

#: margin for the converse directions of the definiteness axioms
DEFINITENESS_MARGIN = 1e-12
#: t-grid searched by the existence conditions on nonzero vectors
EXISTENCE_T_GRID = (1.0, 10.0, 0.1, 100.0, 0.01, 1e3, 1e-3, 1e4, 1e5, 1e6)


@dataclass(frozen=True)
class VectorSpaceConfig:
    """``R^dimension`` with a crisp p-norm (``p >= 1``) or the max-norm."""

    dimension: int
    crisp_norm: str = "p"
    p: float = 2.0

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise DomainError("dimension must be a positive integer")
        if self.crisp_norm not in ("p", "max"):
            raise DomainError(f"unknown crisp norm {self.crisp_norm!r}")
        if self.crisp_norm == "p" and not self.p >= 1:
            raise DomainError("p-norm needs p >= 1")

    @property
    def theta(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def basis(self) -> np.ndarray:
        return np.eye(self.dimension)

    def norms(self, X) -> np.ndarray:
        """Crisp norm of each row of ``X``."""
        X = np.asarray(X, float)
        if self.crisp_norm == "max":
            return np.max(np.abs(X), axis=-1)
        if self.p == 2:
            return np.sqrt(np.sum(X * X, axis=-1))
        return np.linalg.norm(X, ord=self.p, axis=-1)

    def norm(self, x) -> float:
        return float(self.norms(np.asarray(x, float)))

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        if x.shape[-1:] != (self.dimension,):
            raise ShapeError(f"expected dimension {self.dimension}, got shape {x.shape}")
        return x


@dataclass(frozen=True)
class MembershipPair:
    mu: float
    nu: float

    def is_valid(self, tol: float = 1e-9) -> bool:
        return self.mu + self.nu <= 1.0 + tol and self.mu > 0.0 and self.nu < 1.0


@dataclass(frozen=True)
class GifPsiNorm:
    """A membership/non-membership pair on ``R^d x (0, inf)``.

    ``kind="standard"`` is ``mu = t / (t + k|x|)``, ``nu = k|x| / (t + k|x|)``
    over the crisp norm of ``space``.  ``kind="custom"`` evaluates the
    callables ``mu_fn(x, t)`` and ``nu_fn(x, t)``.
    """

    space: VectorSpaceConfig
    connectives: FuzzyConnectives = field(default_factory=FuzzyConnectives)
    kind: str = "standard"
    k: float = 1.0
    mu_fn: Callable | None = field(default=None, compare=False, repr=False)
    nu_fn: Callable | None = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind == "standard":
            if not self.k > 0:
                raise DomainError(f"k must be > 0, got {self.k!r}")
        elif self.kind == "custom":
            if self.mu_fn is None or self.nu_fn is None:
                raise DomainError("custom norm needs both mu_fn and nu_fn")
        else:
            raise DomainError(f"unknown norm kind {self.kind!r}")

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def describe(self) -> dict:
        out = {"kind": self.kind, "dimension": self.dimension,
               "crisp_norm": self.space.crisp_norm, "connectives": self.connectives.describe()}
        if self.space.crisp_norm == "p":
            out["p"] = self.space.p
        if self.kind == "standard":
            out["k"] = self.k
        else:
            out["name"] = self.name or "custom"
        return out

    # scalar evaluation is unchecked; use eval_membership for validated input
    def mu(self, x, t: float) -> float:
        if self.kind == "standard":
            kn = self.k * self.space.norm(x)
            return t / (t + kn)
        return float(self.mu_fn(np.asarray(x, float), float(t)))

    def nu(self, x, t: float) -> float:
        if self.kind == "standard":
            kn = self.k * self.space.norm(x)
            return kn / (t + kn)
        return float(self.nu_fn(np.asarray(x, float), float(t)))

    def batch(self, X, T) -> tuple[np.ndarray, np.ndarray]:
        """``(mu, nu)`` for rows of ``X`` against matching (or broadcast) ``T``."""
        X = np.atleast_2d(np.asarray(X, float))
        T = np.broadcast_to(np.asarray(T, float), (X.shape[0],))
        if self.kind == "standard":
            kn = self.k * self.space.norms(X)
            denom = T + kn
            return T / denom, kn / denom
        mu = np.array([self.mu_fn(x, float(t)) for x, t in zip(X, T)], float)
        nu = np.array([self.nu_fn(x, float(t)) for x, t in zip(X, T)], float)
        return mu, nu

    def curve(self, x) -> tuple[Callable, Callable]:
        """``t -> mu(x, t)`` and ``t -> nu(x, t)`` for a fixed vector."""
        x = np.asarray(x, float)
        if self.kind == "standard":
            kn = self.k * self.space.norm(x)
            return (lambda t: t / (t + kn)), (lambda t: kn / (t + kn))
        return (lambda t: self.mu(x, t)), (lambda t: self.nu(x, t))


def standard_construction(space: VectorSpaceConfig, k: float = 1.0,
                          connectives: FuzzyConnectives | None = None) -> GifPsiNorm:
    if not k > 0:
        raise DomainError(f"k must be > 0, got {k!r}")
    return GifPsiNorm(space, connectives or FuzzyConnectives(), "standard", float(k))


def eval_membership(n: GifPsiNorm, x, t: float) -> MembershipPair:
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    x = n.space.check(x)
    if x.ndim != 1:
        raise ShapeError("eval_membership takes a single vector")
    return MembershipPair(n.mu(x, t), n.nu(x, t))


# ---------------------------------------------------------------- sampling


def _log_uniform(rng, low, high, size):
    return 10.0 ** rng.uniform(np.log10(low), np.log10(high), size)


@dataclass
class _Samples:
    X: np.ndarray
    Y: np.ndarray
    S: np.ndarray
    T: np.ndarray
    A: np.ndarray  # nonzero scalars
    T2: np.ndarray  # T2 >= T for monotonicity


def _draw(space: VectorSpaceConfig, sampler: SamplerConfig) -> tuple[_Samples, np.ndarray]:
    rng = sampler.rng(10)
    d = space.dimension
    m = sampler.samples
    eye = np.eye(d)
    theta = np.zeros((1, d))

    forced_x = np.vstack([theta, eye, -eye])
    X = np.vstack([forced_x, rng.uniform(-10, 10, (max(m - len(forced_x), 0), d))])[:m]

    # triangle pairs: basis pairs at s = t = 1 first, then collinear, then free
    forced_pairs_x = np.vstack([eye, theta, eye[:1]])
    forced_pairs_y = np.vstack([eye, eye[:1], 2 * eye[:1]])
    nf = min(len(forced_pairs_x), m)
    Y = rng.uniform(-10, 10, (m, d))
    collinear = np.arange(m) < m // 4
    Y[collinear] = X[collinear] * rng.uniform(-3, 3, (int(collinear.sum()), 1))
    Y[:nf] = forced_pairs_y[:nf]
    Xt = X.copy()
    Xt[:nf] = forced_pairs_x[:nf]

    S = _log_uniform(rng, 1e-3, 1e3, m)
    T = _log_uniform(rng, 1e-3, 1e3, m)
    S[:nf] = 1.0
    T[:nf] = 1.0
    A = _log_uniform(rng, 1e-3, 1e3, m) * rng.choice([-1.0, 1.0], m)
    T2 = T * _log_uniform(rng, 1.0, 1e3, m)
    return _Samples(X=Xt, Y=Y, S=S, T=T, A=A, T2=T2), X


def _vec(v):
    return [float(c) for c in np.asarray(v).ravel()]


def validate_axioms(n: GifPsiNorm, sampler: SamplerConfig | None = None) -> AxiomReport:
    """Check axioms (i)-(xi) of the norm on seeded samples.

    The limit parts of (vi) and (xi) are tested at the finite horizon
    ``sampler.horizon`` with slack ``sampler.horizon_eps``.
    """
    sampler = sampler or SamplerConfig()
    tol = sampler.tolerance
    smp, X = _draw(n.space, sampler)
    m = X.shape[0]
    con = n.connectives
    report = AxiomReport(f"norm {n.describe()}")
    T, S, A, T2 = smp.T, smp.S, smp.A, smp.T2

    mu, nu = n.batch(X, T)
    w_xt = lambda i: {"x": _vec(X[i]), "t": T[i]}  # noqa: E731

    record_violations(report, "i", mu + nu > 1.0 + tol, m, w_xt, mu + nu, np.ones(m), tol,
                      note="mu + nu <= 1")
    record_violations(report, "ii", ~(mu > 0.0), m, w_xt, mu, np.zeros(m), 0.0, note="mu > 0")

    # (iii) and (viii): exact at theta, margin-separated elsewhere
    is_theta = ~X.any(axis=1)
    theta_rows = np.zeros_like(X)
    mu0, nu0 = n.batch(theta_rows, T)
    bad_theta = np.abs(mu0 - 1.0) > tol
    bad_conv = ~is_theta & (mu > 1.0 - DEFINITENESS_MARGIN)
    _definiteness(report, "iii", bad_theta, bad_conv, T, X, mu0, mu, 1.0, m, tol,
                  "mu(x,t) = 1 iff x = theta")
    bad_theta_nu = np.abs(nu0) > tol
    bad_conv_nu = ~is_theta & (nu < DEFINITENESS_MARGIN)
    _definiteness(report, "viii", bad_theta_nu, bad_conv_nu, T, X, nu0, nu, 0.0, m, tol,
                  "nu(x,t) = 0 iff x = theta")

    # (iv) and (ix): scaling through psi
    psi_a = con.psi.evaluate(A)
    mu_ax, nu_ax = n.batch(X * A[:, None], T)
    mu_sc, nu_sc = n.batch(X, T / psi_a)
    w_scale = lambda i: {"x": _vec(X[i]), "t": T[i], "alpha": A[i]}  # noqa: E731
    record_violations(report, "iv", np.abs(mu_ax - mu_sc) > tol, m, w_scale, mu_ax, mu_sc, tol,
                      note="mu(alpha x, t) = mu(x, t / psi(alpha))")

    # (v) and (x): triangle through the t-norm / t-conorm and circle
    Xt, Y = smp.X, smp.Y
    mu_x, nu_x = n.batch(Xt, S)
    mu_y, nu_y = n.batch(Y, T)
    st = con.circle.evaluate(S, T)
    mu_xy, nu_xy = n.batch(Xt + Y, st)
    lhs_mu = con.tnorm.evaluate(mu_x, mu_y)
    lhs_nu = con.tconorm.evaluate(nu_x, nu_y)
    w_tri = lambda i: {"x": _vec(Xt[i]), "y": _vec(Y[i]), "s": S[i], "t": T[i]}  # noqa: E731
    record_violations(report, "v", lhs_mu > mu_xy + tol, m, w_tri, lhs_mu, mu_xy, tol,
                      note="mu(x,s) * mu(y,t) <= mu(x+y, s o t)")

    # (vi): nondecreasing in t, and horizon surrogate for the limit
    mu2, nu2 = n.batch(X, T2)
    mu_inf, nu_inf = n.batch(X, sampler.horizon)
    _limit_axiom(report, "vi", mu > mu2 + tol, mu_inf < 1.0 - sampler.horizon_eps,
                 X, T, T2, mu, mu2, mu_inf, 1.0 - sampler.horizon_eps, m, tol, sampler.horizon,
                 "mu(x, .) nondecreasing; mu(x, T_inf) >= 1 - eps")

    record_violations(report, "vii", ~(nu < 1.0), m, w_xt, nu, np.ones(m), 0.0, note="nu < 1")
    record_violations(report, "ix", np.abs(nu_ax - nu_sc) > tol, m, w_scale, nu_ax, nu_sc, tol,
                      note="nu(alpha x, t) = nu(x, t / psi(alpha))")
    record_violations(report, "x", lhs_nu < nu_xy - tol, m, w_tri, lhs_nu, nu_xy, tol,
                      note="nu(x,s) <> nu(y,t) >= nu(x+y, s o t)")
    _limit_axiom(report, "xi", nu < nu2 - tol, nu_inf > sampler.horizon_eps,
                 X, T, T2, nu, nu2, nu_inf, sampler.horizon_eps, m, tol, sampler.horizon,
                 "nu(x, .) nonincreasing; nu(x, T_inf) <= eps")
    order = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi"]
    report.entries.sort(key=lambda e: order.index(e.axiom))
    return report


def _definiteness(report, axiom, bad_theta, bad_conv, T, X, at_theta, values, target, m, tol, note):
    if bad_theta.any():
        i = int(np.flatnonzero(bad_theta)[0])
        report.add(AxiomEntry(axiom, "fail", checked=2 * m, violations=int(bad_theta.sum() + bad_conv.sum()),
                              witness={"x": [0.0] * X.shape[1], "t": float(T[i]), "direction": "theta"},
                              lhs=float(at_theta[i]), rhs=target, tolerance=tol, note=note))
    elif bad_conv.any():
        i = int(np.flatnonzero(bad_conv)[0])
        report.add(AxiomEntry(axiom, "fail", checked=2 * m, violations=int(bad_conv.sum()),
                              witness={"x": _vec(X[i]), "t": float(T[i]), "direction": "converse"},
                              lhs=float(values[i]), rhs=target, tolerance=DEFINITENESS_MARGIN, note=note))
    else:
        report.add(AxiomEntry(axiom, PASS, checked=2 * m, tolerance=tol, note=note))


def _limit_axiom(report, axiom, bad_mono, bad_horizon, X, T, T2, v1, v2, v_inf, bound, m, tol,
                 horizon, note):
    if bad_mono.any():
        i = int(np.flatnonzero(bad_mono)[0])
        report.add(AxiomEntry(axiom, "fail", checked=2 * m,
                              violations=int(bad_mono.sum() + bad_horizon.sum()),
                              witness={"x": _vec(X[i]), "s": float(T[i]), "t": float(T2[i]),
                                       "part": "monotonicity"},
                              lhs=float(v1[i]), rhs=float(v2[i]), tolerance=tol, note=note))
    elif bad_horizon.any():
        i = int(np.flatnonzero(bad_horizon)[0])
        report.add(AxiomEntry(axiom, "fail", checked=2 * m, violations=int(bad_horizon.sum()),
                              witness={"x": _vec(X[i]), "t": horizon, "part": "horizon"},
                              lhs=float(v_inf[i]), rhs=bound, tolerance=tol, note=note))
    else:
        report.add(AxiomEntry(axiom, PASS, checked=2 * m, tolerance=tol,
                              note=note + f" (horizon T_inf={horizon:g})"))


def witness_sides(n: GifPsiNorm, axiom: str, witness: dict) -> tuple[float, float]:
    """Re-evaluate the two sides of a reported relation from its witness alone.

    Uses the scalar evaluation path, independent of the batched sampler.
    """
    con = n.connectives
    x = np.asarray(witness.get("x", []), float)
    if axiom in ("v", "x"):
        y = np.asarray(witness["y"], float)
        s, t = witness["s"], witness["t"]
        st = con.circle(s, t)
        if axiom == "v":
            return con.tnorm(n.mu(x, s), n.mu(y, t)), n.mu(x + y, st)
        return con.tconorm(n.nu(x, s), n.nu(y, t)), n.nu(x + y, st)
    if axiom in ("iv", "ix"):
        a, t = witness["alpha"], witness["t"]
        f = n.mu if axiom == "iv" else n.nu
        return f(a * x, t), f(x, t / con.psi(a))
    if axiom == "i":
        t = witness["t"]
        return n.mu(x, t) + n.nu(x, t), 1.0
    if axiom in ("ii", "iii"):
        return n.mu(x, witness["t"]), (0.0 if axiom == "ii" else 1.0)
    if axiom in ("vii", "viii"):
        return n.nu(x, witness["t"]), (1.0 if axiom == "vii" else 0.0)
    if axiom in ("vi", "xi"):
        f = n.mu if axiom == "vi" else n.nu
        if witness.get("part") == "horizon":
            return f(x, witness["t"]), float("nan")
        return f(x, witness["s"]), f(x, witness["t"])
    raise KeyError(axiom)


def check_extra_conditions(n: GifPsiNorm, sampler: SamplerConfig | None = None) -> AxiomReport:
    """Idempotence of both connectives and the existence conditions on x != theta.

    The existence conditions are tested in contrapositive form: every sampled
    nonzero x has some grid t with mu(x, t) < 1 (resp. nu(x, t) > 0).
    """
    sampler = sampler or SamplerConfig()
    tol = sampler.tolerance
    report = AxiomReport(f"extra conditions {n.describe()}")
    rng = sampler.rng(11)
    a = np.concatenate([[0.0, 1.0, 0.5, 0.2, 0.8], rng.random(max(sampler.samples - 5, 0))])
    ta = n.connectives.tnorm.evaluate(a, a)
    sa = n.connectives.tconorm.evaluate(a, a)
    bad_t = np.abs(ta - a) > tol
    bad_s = np.abs(sa - a) > tol
    if bad_t.any() or bad_s.any():
        use_t = bad_t.any() and (not bad_s.any() or np.argmax(bad_t) <= np.argmax(bad_s))
        mask, vals, which = (bad_t, ta, "tnorm") if use_t else (bad_s, sa, "tconorm")
        i = int(np.argmax(mask))
        report.add(AxiomEntry("xii", "fail", checked=2 * a.size,
                              violations=int(bad_t.sum() + bad_s.sum()),
                              witness={"a": float(a[i]), "connective": which},
                              lhs=float(vals[i]), rhs=float(a[i]), tolerance=tol,
                              note="a * a = a and a <> a = a"))
    else:
        report.add(AxiomEntry("xii", PASS, checked=2 * a.size, tolerance=tol,
                              note="a * a = a and a <> a = a"))

    d = n.dimension
    eye = np.eye(d)
    X = np.vstack([eye, rng.uniform(-10, 10, (max(sampler.samples - d, 0), d))])[:max(sampler.samples, d)]
    X = X[X.any(axis=1)]
    grid = np.array(EXISTENCE_T_GRID)
    for axiom, part in (("xiii", "mu"), ("xiv", "nu")):
        found_t = np.full(X.shape[0], np.nan)
        found_v = np.full(X.shape[0], np.nan)
        for t in grid:
            mu, nu = n.batch(X, t)
            vals = mu if part == "mu" else nu
            hit = (vals < 1.0) if part == "mu" else (vals > 0.0)
            new = hit & np.isnan(found_t)
            found_t[new] = t
            found_v[new] = vals[new]
        missing = np.isnan(found_t)
        note = ("x != theta has some t with mu(x,t) < 1" if part == "mu"
                else "x != theta has some t with nu(x,t) > 0")
        if missing.any():
            i = int(np.argmax(missing))
            report.add(AxiomEntry(axiom, "fail", checked=X.shape[0], violations=int(missing.sum()),
                                  witness={"x": _vec(X[i]), "t_grid": list(EXISTENCE_T_GRID)},
                                  tolerance=0.0, note=note))
        else:
            report.add(AxiomEntry(axiom, PASS, checked=X.shape[0], tolerance=0.0, note=note,
                                  evidence={"x": _vec(X[0]), "t": float(found_t[0]),
                                            part: float(found_v[0])}))
    return report
