"""Continuity of maps between two fuzzy normed spaces, tested by sampling.

Three notions are checked at a point ``x0``:

* IFC: for every ``(eps, alpha)`` some ``(delta, beta)`` makes
  ``mu_U(x - x0, delta) > beta`` imply ``mu_V(f(x) - f(x0), eps) > alpha``
  (and ``nu_U < 1 - beta`` imply ``nu_V < 1 - alpha``).  The older variant
  (``complement_thresholds=True``) uses the thresholds ``1 - beta => 1 - alpha`` for
  mu and ``beta => alpha`` for nu.
* strongly IFC: for every ``eps`` some ``delta`` gives
  ``mu_V(f(x) - f(x0), eps) >= mu_U(x - x0, delta)`` and
  ``nu_V(...) <= nu_U(...)`` for all ``x``.
* sequentially IFC: images of sequences converging to ``x0`` converge to
  ``f(x0)``.

Strict comparisons carry a margin of ``1e-12``: a premise counts as true
when it holds up to the margin, a conclusion only when it holds beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .compactness import (AffineImage, Ball, CompactnessReport, FiniteSet, check_compact,
                          extract_convergent_subsequence)
from .core import GifPsiNorm
from .errors import DomainError, PreconditionError, ShapeError, UnsupportedError
from .reports import SamplerConfig
from .sequences import (CONVERGES, DEFAULT_R_GRID, DEFAULT_T_GRID,
                        SequenceSpec, check_convergence, explicit_from)

MARGIN = 1e-12
DELTA_GRID = tuple(np.logspace(-6, 3, 32).tolist())
BETA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
EPS_GRID = (0.5, 1.0, 2.0)
ALPHA_GRID = (0.5, 0.9)
CONTINUITY_SAMPLES = 2000
RADIUS_RANGE = (1e-12, 1e2)
SEARCH_STREAM, VERIFY_STREAM = 30, 31

COMPONENTWISE = ("scale", "square", "sign", "radial-normalize")
MAP_KINDS = ("linear", "affine", "componentwise", "custom")


@dataclass(frozen=True)
class MapSpec:
    """A map ``R^in_dim -> R^out_dim``.

    ``componentwise`` draws from a fixed catalog: ``scale`` (``c * x``),
    ``square``, ``sign`` (discontinuous at 0) and ``radial-normalize``
    (``x / |x|_2``, with ``theta -> theta``; not coordinatewise, but listed
    with the catalog maps).
    """

    kind: str
    in_dim: int
    out_dim: int
    params: dict = field(default_factory=dict, compare=False)
    fn: Callable | None = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in MAP_KINDS:
            raise DomainError(f"unknown map kind {self.kind!r}")
        if self.kind == "componentwise" and self.params.get("function") not in COMPONENTWISE:
            raise DomainError(f"componentwise function must be one of {COMPONENTWISE}")
        if self.kind == "custom" and self.fn is None:
            raise DomainError("custom map needs fn")

    @classmethod
    def linear(cls, matrix, name=""):
        A = np.atleast_2d(np.asarray(matrix, float))
        return cls("linear", A.shape[1], A.shape[0], {"matrix": A.tolist()}, name=name)

    @classmethod
    def affine(cls, matrix, offset, name=""):
        A = np.atleast_2d(np.asarray(matrix, float))
        b = np.asarray(offset, float).ravel()
        if b.size != A.shape[0]:
            raise ShapeError("offset length must match the matrix row count")
        return cls("affine", A.shape[1], A.shape[0], {"matrix": A.tolist(), "offset": b.tolist()},
                   name=name)

    @classmethod
    def componentwise(cls, function, dim, c=1.0, name=""):
        return cls("componentwise", dim, dim, {"function": function, "c": float(c)}, name=name)

    @classmethod
    def scaling(cls, c, dim, name=""):
        return cls.componentwise("scale", dim, c, name=name)

    @classmethod
    def identity(cls, dim, name="identity"):
        return cls.linear(np.eye(dim), name=name)

    @classmethod
    def custom(cls, fn, in_dim, out_dim, name=""):
        return cls("custom", in_dim, out_dim, {}, fn=fn, name=name)

    @property
    def is_affine(self) -> bool:
        return self.kind in ("linear", "affine") or (
            self.kind == "componentwise" and self.params["function"] == "scale")

    def affine_parts(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind in ("linear", "affine"):
            A = np.asarray(self.params["matrix"], float)
            return A, np.asarray(self.params.get("offset", np.zeros(A.shape[0])), float)
        if self.is_affine:
            return self.params["c"] * np.eye(self.in_dim), np.zeros(self.in_dim)
        raise UnsupportedError(f"{self.label()} is not affine")

    def apply(self, X) -> np.ndarray:
        """Map each row of ``X``."""
        X = np.atleast_2d(np.asarray(X, float))
        if X.shape[1] != self.in_dim:
            raise ShapeError(f"map expects dimension {self.in_dim}, got {X.shape[1]}")
        if self.is_affine:
            A, b = self.affine_parts()
            return X @ A.T + b
        if self.kind == "custom":
            return np.vstack([np.asarray(self.fn(x), float).ravel() for x in X])
        fn = self.params["function"]
        if fn == "square":
            return X * X
        if fn == "sign":
            return np.sign(X)
        norms = np.sqrt(np.sum(X * X, axis=1, keepdims=True))
        return np.divide(X, norms, out=np.zeros_like(X), where=norms > 0)

    def __call__(self, x) -> np.ndarray:
        return self.apply(x)[0]

    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "componentwise":
            return self.params["function"]
        return self.kind

    def describe(self) -> dict:
        out = {"kind": self.kind, "in_dim": self.in_dim, "out_dim": self.out_dim,
               "name": self.label()}
        if self.kind != "custom":
            out.update(self.params)
        return out


def _check_pair(f: MapSpec, U: GifPsiNorm, V: GifPsiNorm, x0) -> np.ndarray:
    if f.in_dim != U.dimension or f.out_dim != V.dimension:
        raise ShapeError(f"map {f.in_dim}->{f.out_dim} does not fit spaces "
                         f"{U.dimension}->{V.dimension}")
    return U.space.check(x0)


def sample_near(x0, sampler: SamplerConfig, stream: int, count: int) -> np.ndarray:
    """``x0 + r u`` with ``u`` a random unit direction and ``log10 r`` uniform."""
    rng = sampler.rng(stream)
    d = x0.size
    u = rng.standard_normal((count, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    lo, hi = np.log10(RADIUS_RANGE[0]), np.log10(RADIUS_RANGE[1])
    r = 10.0 ** rng.uniform(lo, hi, count)
    return x0 + u * r[:, None]


def _continuity_sampler(sampler: SamplerConfig | None) -> SamplerConfig:
    return sampler or SamplerConfig(samples=CONTINUITY_SAMPLES)


class _Memberships:
    """Cached memberships of ``x - x0`` in U and ``f(x) - f(x0)`` in V."""

    def __init__(self, f, x0, U, V, X):
        self.X = X
        self.D = X - x0
        self.F = f.apply(X) - f(x0)
        self.U, self.V = U, V
        self._v = {}

    def u(self, delta):
        return self.U.batch(self.D, delta)

    def v(self, eps):
        if eps not in self._v:
            self._v[eps] = self.V.batch(self.F, eps)
        return self._v[eps]


# ---------------------------------------------------------------- strong


@dataclass
class StrongResult:
    verdict: bool
    table: list[dict]  # per eps: delta (largest verified) or witness
    delta_grid: list[float]
    samples: int

    @property
    def witnesses(self) -> list[dict]:
        return [row["witness"] for row in self.table if row.get("witness")]


def _strong_ok(m: _Memberships, eps, delta, margin):
    mu_v, nu_v = m.v(eps)
    mu_u, nu_u = m.u(delta)
    return (mu_v >= mu_u - margin) & (nu_v <= nu_u + margin)


def check_strongly_ifc(f: MapSpec, x0, U: GifPsiNorm, V: GifPsiNorm, eps_grid=EPS_GRID,
                       delta_search_grid=DELTA_GRID, sampler: SamplerConfig | None = None,
                       margin: float = MARGIN) -> StrongResult:
    """Largest grid ``delta`` per ``eps`` that survives search and re-sampling.

    A failing ``eps`` carries the first sample violating the smallest grid
    ``delta``; since ``mu_U`` rises and ``nu_U`` falls in ``delta``, that
    sample violates every candidate.
    """
    if not eps_grid or not delta_search_grid:
        raise DomainError("eps and delta grids must be nonempty")
    if any(not e > 0 for e in eps_grid) or any(not d > 0 for d in delta_search_grid):
        raise DomainError("eps and delta values must be > 0")
    x0 = _check_pair(f, U, V, x0)
    sampler = _continuity_sampler(sampler)
    deltas = sorted(float(d) for d in delta_search_grid)
    search = _Memberships(f, x0, U, V, sample_near(x0, sampler, SEARCH_STREAM, sampler.samples))
    verify = _Memberships(f, x0, U, V, sample_near(x0, sampler, VERIFY_STREAM, sampler.samples))
    table = []
    for eps in (float(e) for e in eps_grid):
        chosen = None
        for delta in reversed(deltas):
            if _strong_ok(search, eps, delta, margin).all() and \
                    _strong_ok(verify, eps, delta, margin).all():
                chosen = delta
                break
        if chosen is not None:
            table.append({"eps": eps, "delta": chosen})
            continue
        d0 = deltas[0]
        for m in (search, verify):
            bad = ~_strong_ok(m, eps, d0, margin)
            if bad.any():
                i = int(np.flatnonzero(bad)[0])
                mu_v, nu_v = m.v(eps)
                mu_u, nu_u = m.u(d0)
                table.append({"eps": eps, "delta": None, "witness": {
                    "x": m.X[i].tolist(), "delta": d0,
                    "mu_V": float(mu_v[i]), "mu_U": float(mu_u[i]),
                    "nu_V": float(nu_v[i]), "nu_U": float(nu_u[i])}})
                break
    verdict = all(row["delta"] is not None for row in table)
    return StrongResult(verdict, table, deltas, sampler.samples)


# ---------------------------------------------------------------- IFC


@dataclass
class IFCResult:
    eps: float
    alpha: float
    verdict: bool
    delta: float | None
    beta: float | None
    counterexample: dict | None
    form: str


def _thresholds(alpha, beta, complement_thresholds):
    # (premise mu, premise nu, conclusion mu, conclusion nu)
    if complement_thresholds:
        return 1.0 - beta, beta, 1.0 - alpha, alpha
    return beta, 1.0 - beta, alpha, 1.0 - alpha


def _ifc_bad(m: _Memberships, eps, alpha, delta, beta, compat, margin):
    pm, pn, cm, cn = _thresholds(alpha, beta, compat)
    mu_u, nu_u = m.u(delta)
    mu_v, nu_v = m.v(eps)
    bad_mu = (mu_u > pm - margin) & ~(mu_v > cm + margin)
    bad_nu = (nu_u < pn + margin) & ~(nu_v < cn - margin)
    return bad_mu | bad_nu


def check_ifc(f: MapSpec, x0, U: GifPsiNorm, V: GifPsiNorm, eps: float, alpha: float,
              delta_grid=DELTA_GRID, beta_grid=BETA_GRID, sampler: SamplerConfig | None = None,
              complement_thresholds: bool = False, margin: float = MARGIN) -> IFCResult:
    """First ``(delta, beta)`` (largest delta, then smallest beta) surviving
    the search sample and a fresh verification sample, else a counterexample."""
    if not eps > 0:
        raise DomainError("eps must be > 0")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in open (0,1)")
    if not delta_grid or not beta_grid:
        raise DomainError("delta and beta grids must be nonempty")
    x0 = _check_pair(f, U, V, x0)
    sampler = _continuity_sampler(sampler)
    search = _Memberships(f, x0, U, V, sample_near(x0, sampler, SEARCH_STREAM, sampler.samples))
    verify = _Memberships(f, x0, U, V, sample_near(x0, sampler, VERIFY_STREAM, sampler.samples))
    form = "complement" if complement_thresholds else "direct"
    deltas = sorted((float(d) for d in delta_grid), reverse=True)
    betas = sorted(float(b) for b in beta_grid)
    for delta in deltas:
        for beta in betas:
            if _ifc_bad(search, eps, alpha, delta, beta, complement_thresholds, margin).any():
                continue
            if _ifc_bad(verify, eps, alpha, delta, beta, complement_thresholds, margin).any():
                continue
            return IFCResult(eps, alpha, True, delta, beta, None, form)
    # the most permissive candidate: smallest delta with the strongest premise
    delta, beta = deltas[-1], (betas[-1] if not complement_thresholds else betas[0])
    for m in (search, verify):
        bad = _ifc_bad(m, eps, alpha, delta, beta, complement_thresholds, margin)
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            mu_u, nu_u = m.u(delta)
            mu_v, nu_v = m.v(eps)
            cx = {"x": m.X[i].tolist(), "delta": delta, "beta": beta,
                  "mu_U": float(mu_u[i]), "nu_U": float(nu_u[i]),
                  "mu_V": float(mu_v[i]), "nu_V": float(nu_v[i])}
            return IFCResult(eps, alpha, False, None, None, cx, form)
    # every candidate fails on some sample, but not this one: report the first failure
    bad = _ifc_bad(search, eps, alpha, deltas[0], betas[0], complement_thresholds, margin)
    i = int(np.flatnonzero(bad)[0])
    return IFCResult(eps, alpha, False, None, None,
                     {"x": search.X[i].tolist(), "delta": deltas[0], "beta": betas[0]}, form)


def check_ifc_grid(f, x0, U, V, eps_grid=EPS_GRID, alpha_grid=ALPHA_GRID, sampler=None,
                   complement_thresholds=False) -> list[IFCResult]:
    return [check_ifc(f, x0, U, V, e, a, sampler=sampler, complement_thresholds=complement_thresholds)
            for e in eps_grid for a in alpha_grid]


# ---------------------------------------------------------------- sequential


@dataclass
class SequentialResult:
    verdict: bool
    members: list[dict]
    image_limit: list[float]
    # failing members, kept so they can be passed back as retained_witnesses
    failing: list = field(default_factory=list, repr=False, metadata={"json": False})


def default_family(x0) -> list[SequenceSpec]:
    """Sequences converging to ``x0`` from several directions and at several rates."""
    x0 = np.asarray(x0, float)
    d = x0.size
    e1 = np.eye(d)[0]
    ones = np.ones(d) / np.sqrt(d)
    return [
        SequenceSpec.affine_decay(x0, e1, name="x0 + e1/n"),
        SequenceSpec.affine_decay(x0, -np.eye(d)[-1], name="x0 - e_d/n"),
        SequenceSpec.geometric(x0, ones, 0.5, name="x0 + u 2^-n"),
        SequenceSpec.geometric(x0, e1, -0.5, name="x0 + e1 (-1/2)^n"),
    ]


def check_sequentially_ifc(f: MapSpec, x0, U: GifPsiNorm, V: GifPsiNorm, family=None,
                           r_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID,
                           N: int = 1000, retained_witnesses=()) -> SequentialResult:
    """Images of every family member must converge to ``f(x0)`` in ``V``.

    ``retained_witnesses`` are earlier failing members; they are re-checked
    alongside the family so a larger family never loses a negative verdict.
    """
    x0 = _check_pair(f, U, V, x0)
    family = list(default_family(x0) if family is None else family) + list(retained_witnesses)
    if not family:
        raise DomainError("sequence family must be nonempty")
    fx0 = f(x0)
    members, failing = [], []
    for s in family:
        pre = check_convergence(U, s, x0, r_grid, t_grid, N)
        if pre.verdict != CONVERGES:
            raise PreconditionError(
                f"family member {s.label()} does not converge to {x0.tolist()}: {pre.verdict}")
        images = f.apply(s.terms(N))
        img = explicit_from(images, name=f"f({s.label()})")
        rep = check_convergence(V, img, fx0, r_grid, t_grid, N)
        row = {"member": s.label(), "image_converges": rep.verdict == CONVERGES,
               "verdict": rep.verdict, "image_at_horizon": images[-1].tolist()}
        if rep.verdict != CONVERGES:
            row["failing_cells"] = [c for c in rep.rows() if c["verdict"] != "certified"]
            failing.append(s)
        members.append(row)
    return SequentialResult(all(m["image_converges"] for m in members), members, fx0.tolist(),
                            failing)


# ---------------------------------------------------------------- consistency


@dataclass
class ContinuityConsistency:
    relation: str
    first_verdict: bool
    second_verdict: bool
    violation: bool
    first: object = None
    second: object = None


def check_ifc_iff_sequential(f, x0, U, V, family=None, eps_grid=EPS_GRID, alpha_grid=ALPHA_GRID,
                             r_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID, N: int = 1000,
                             sampler=None, complement_thresholds=False) -> ContinuityConsistency:
    ifc = check_ifc_grid(f, x0, U, V, eps_grid, alpha_grid, sampler, complement_thresholds)
    seq = check_sequentially_ifc(f, x0, U, V, family, r_grid, t_grid, N)
    a = all(r.verdict for r in ifc)
    return ContinuityConsistency("ifc iff sequentially ifc", a, seq.verdict, a != seq.verdict,
                                 ifc, seq)


def check_strong_implies_sequential(f, x0, U, V, family=None, eps_grid=EPS_GRID,
                                    delta_search_grid=DELTA_GRID, r_grid=DEFAULT_R_GRID,
                                    t_grid=DEFAULT_T_GRID, N: int = 1000,
                                    sampler=None) -> ContinuityConsistency:
    strong = check_strongly_ifc(f, x0, U, V, eps_grid, delta_search_grid, sampler)
    seq = check_sequentially_ifc(f, x0, U, V, family, r_grid, t_grid, N)
    return ContinuityConsistency("strongly ifc implies sequentially ifc", strong.verdict,
                                 seq.verdict, strong.verdict and not seq.verdict, strong, seq)


# ---------------------------------------------------------------- compact images


def image_set(f: MapSpec, S):
    """Membership-testable image of ``S`` under ``f``."""
    if isinstance(S, FiniteSet):
        return FiniteSet(f.apply(S.array))
    if isinstance(S, (Ball, AffineImage)) and f.is_affine:
        A, b = f.affine_parts()
        if isinstance(S, AffineImage):
            A0, b0 = np.asarray(S.A), np.asarray(S.b)
            return AffineImage(A @ A0, A @ b0 + b, S.base)
        return AffineImage(A, b, S)
    raise UnsupportedError(f"image of {type(S).__name__} under {f.label()} is not supported")


@dataclass
class CompactImageReport:
    continuity: list[SequentialResult]
    image: CompactnessReport

    @property
    def compatible(self) -> bool:
        return self.image.compatible


def check_compact_image(f: MapSpec, U: GifPsiNorm, V: GifPsiNorm, S, probes, N: int = 1000,
                        r_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID) -> CompactImageReport:
    """Run the compactness battery on ``f(probe)`` against ``f(S)``.

    The precondition is checked where it matters: at each probe's subsequence
    limit, with the subsequence itself as the converging family.
    """
    target = image_set(f, S)
    continuity = []
    for p in probes:
        sub = extract_convergent_subsequence(U, p, N, r_grid=r_grid, t_grid=t_grid)
        fam = [explicit_from(p.terms(N)[np.asarray(sub.indices) - 1], name=f"{p.label()}[sub]")]
        seq = check_sequentially_ifc(f, sub.limit, U, V, fam, r_grid, t_grid, len(sub.indices))
        if not seq.verdict:
            raise PreconditionError(f"{f.label()} is not sequentially continuous at {sub.limit}")
        continuity.append(seq)
    images = [explicit_from(f.apply(p.terms(N)), name=f"f({p.label()})") for p in probes]
    return CompactImageReport(continuity, check_compact(V, target, images, N, r_grid, t_grid))
