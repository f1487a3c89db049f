"""Crisp alpha-norms extracted from a fuzzy norm by monotone bisection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import GifPsiNorm
from .errors import DomainError, RankError, UnreachableLevelError
from .reports import AxiomEntry, AxiomReport, SamplerConfig, record_violations

# The mu-variant is inf{t : mu(x,t) >= alpha}.  The nu-variant is
# inf{t : nu(x,t) <= 1 - alpha}: the supremum form of the nu-ray is unbounded
# because nu(x, .) is nonincreasing, so only the infimum gives a norm.
VARIANTS = ("mu", "nu")


@dataclass(frozen=True)
class AlphaNormFamily:
    source: GifPsiNorm
    variant: str = "mu"
    bracket_cap: float = 1e12
    tolerance: float = 1e-9
    rel_tolerance: float = 1e-14
    max_iter: int = 200

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not (self.bracket_cap > 0 and self.tolerance > 0 and self.rel_tolerance > 0):
            raise DomainError("bracket_cap and tolerances must be > 0")

    def __call__(self, x, alpha: float) -> float:
        return alpha_norm(self, x, alpha)

    def describe(self) -> dict:
        return {"variant": self.variant, "bracket_cap": self.bracket_cap,
                "tolerance": self.tolerance, "rel_tolerance": self.rel_tolerance,
                "convention": ("inf{t : mu(x,t) >= alpha}" if self.variant == "mu"
                               else "inf{t : nu(x,t) <= 1 - alpha}")}


def _check_alpha(alpha: float):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in open (0,1), got {alpha!r}")


def _level_predicate(f: AlphaNormFamily, x, alpha: float):
    mu_t, nu_t = f.source.curve(x)
    if f.variant == "mu":
        return lambda t: mu_t(t) >= alpha
    target = 1.0 - alpha
    return lambda t: nu_t(t) <= target


def alpha_norm(f: AlphaNormFamily, x, alpha: float) -> float:
    """Smallest ``t`` at which the level set condition of ``f`` holds for ``x``.

    The bracket starts at ``[0, 1]`` and doubles until the condition holds at
    its right end; bisection then runs until the bracket is narrower than both
    the absolute and the relative tolerance (or floats run out).
    """
    _check_alpha(alpha)
    x = f.source.space.check(x)
    if not x.any():
        return 0.0
    ok = _level_predicate(f, x, alpha)
    lo, hi = 0.0, 1.0
    while not ok(hi):
        lo, hi = hi, 2.0 * hi
        if hi > f.bracket_cap:
            raise UnreachableLevelError(
                f"level {alpha} not reached below bracket cap {f.bracket_cap:g}")
    for _ in range(f.max_iter):
        if hi - lo <= min(f.tolerance, f.rel_tolerance * hi):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def alpha_norms(f: AlphaNormFamily, X, alpha) -> np.ndarray:
    """Row-wise :func:`alpha_norm`; vectorized for the standard construction.

    ``alpha`` is a scalar or one level per row of ``X``.
    """
    X = np.atleast_2d(f.source.space.check(X))
    alpha = np.broadcast_to(np.asarray(alpha, float), (X.shape[0],))
    for a in np.unique(alpha):
        _check_alpha(float(a))
    if f.source.kind != "standard":
        return np.array([alpha_norm(f, x, float(a)) for x, a in zip(X, alpha)])
    kn = f.source.k * f.source.space.norms(X)
    if f.variant == "mu":
        def ok(t):
            return t / (t + kn) >= alpha
    else:
        target = 1.0 - alpha

        def ok(t):
            return kn / (t + kn) <= target

    zero = kn == 0
    lo = np.zeros_like(kn)
    hi = np.ones_like(kn)
    pending = ~ok(hi) & ~zero
    while pending.any():
        lo = np.where(pending, hi, lo)
        hi = np.where(pending, 2.0 * hi, hi)
        if (hi[pending] > f.bracket_cap).any():
            raise UnreachableLevelError(
                f"level {alpha} not reached below bracket cap {f.bracket_cap:g}")
        pending = ~ok(hi) & ~zero
    active = ~zero
    for _ in range(f.max_iter):
        active &= ~(hi - lo <= np.minimum(f.tolerance, f.rel_tolerance * hi))
        mid = 0.5 * (lo + hi)
        active &= (mid > lo) & (mid < hi)
        if not active.any():
            break
        good = ok(mid)
        hi = np.where(active & good, mid, hi)
        lo = np.where(active & ~good, mid, lo)
    return np.where(zero, 0.0, hi)


def closed_form_alpha_norm(k: float, crisp_norm: float, alpha: float) -> float:
    """``alpha k |x| / (1 - alpha)``, the exact value for the standard construction."""
    return alpha * k * crisp_norm / (1.0 - alpha)


def check_crisp_norm_axioms(f: AlphaNormFamily, alpha: float,
                            sampler: SamplerConfig | None = None,
                            homogeneity_rtol: float = 1e-9) -> AxiomReport:
    """Nonnegativity, definiteness, psi-homogeneity and triangle inequality.

    The triangle inequality is tested, never assumed: the derivation that
    guarantees it relies on the circle operation being addition.
    """
    _check_alpha(alpha)
    sampler = sampler or SamplerConfig()
    rng = sampler.rng(20)
    m = sampler.samples
    d = f.source.dimension
    tol = sampler.tolerance
    X = np.vstack([np.eye(d), rng.uniform(-10, 10, (max(m - d, 0), d))])[:m]
    Y = rng.uniform(-10, 10, (X.shape[0], d))
    if X.shape[0] > d:
        Y[d] = np.eye(d)[min(1, d - 1)]
    C = 10.0 ** rng.uniform(-3, 3, X.shape[0]) * rng.choice([-1.0, 1.0], X.shape[0])

    nx = alpha_norms(f, X, alpha)
    ny = alpha_norms(f, Y, alpha)
    nxy = alpha_norms(f, X + Y, alpha)
    ncx = alpha_norms(f, X * C[:, None], alpha)
    psi_c = f.source.connectives.psi.evaluate(C)
    theta_value = alpha_norm(f, np.zeros(d), alpha)

    report = AxiomReport(f"alpha-norm alpha={alpha} {f.describe()['convention']}")
    w_x = lambda i: {"x": X[i]}  # noqa: E731
    record_violations(report, "nonnegativity", nx < 0, X.shape[0], w_x, nx, np.zeros_like(nx), 0.0)

    if theta_value != 0.0:
        report.add(AxiomEntry("definiteness", "fail", checked=X.shape[0] + 1, violations=1,
                              witness={"x": [0.0] * d}, lhs=theta_value, rhs=0.0, tolerance=0.0,
                              note="norm(theta) = 0 and norm(x) > 0 for x != theta"))
    else:
        nonzero = X.any(axis=1)
        record_violations(report, "definiteness", nonzero & ~(nx > 0), X.shape[0] + 1, w_x, nx,
                          np.zeros_like(nx), 0.0,
                          note="norm(theta) = 0 and norm(x) > 0 for x != theta")

    expected = psi_c * nx
    rel = np.abs(ncx - expected) / np.maximum(np.abs(expected), np.finfo(float).tiny)
    entry = record_violations(report, "psi-homogeneity", rel > homogeneity_rtol, X.shape[0],
                              lambda i: {"x": X[i], "c": C[i]}, ncx, expected, homogeneity_rtol,
                              note="norm(c x) = psi(c) norm(x)")
    entry.evidence = {"max_relative_error": float(rel.max())}

    rhs = nx + ny
    record_violations(report, "triangle", nxy > rhs + tol * np.maximum(1.0, rhs), X.shape[0],
                      lambda i: {"x": X[i], "y": Y[i]}, nxy, rhs, tol,
                      note="norm(x + y) <= norm(x) + norm(y)")
    return report


@dataclass
class AscendingReport:
    alphas: list[float]
    values: list[float]
    violations: list[dict] = field(default_factory=list)

    @property
    def nondecreasing(self) -> bool:
        return not self.violations

    def table(self) -> list[tuple[float, float]]:
        return list(zip(self.alphas, self.values))


def check_ascending_family(f: AlphaNormFamily, x, alpha_grid) -> AscendingReport:
    alphas = [float(a) for a in alpha_grid]
    for a in alphas:
        _check_alpha(a)
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise DomainError("alpha grid must be strictly increasing")
    values = [alpha_norm(f, x, a) for a in alphas]
    report = AscendingReport(alphas, values)
    for i in range(len(values) - 1):
        if values[i + 1] < values[i]:
            report.violations.append({"alpha_low": alphas[i], "alpha_high": alphas[i + 1],
                                      "value_low": values[i], "value_high": values[i + 1]})
    return report


@dataclass
class CollinearityEstimate:
    """Sampled upper bound on the collinearity constant at level ``alpha``.

    ``c_alpha_estimate`` is the smallest alpha-norm of ``sum(a_i x_i)`` seen
    over coefficient vectors with ``sum(|a_i|) = 1``; the true constant can
    only be smaller.
    """

    alpha: float
    vectors: list[list[float]]
    c_alpha_estimate: float
    argmin_coefficients: list[float]
    upper_bound: bool = True
    samples: int = 0
    refine_steps: int = 0


def estimate_collinearity_constant(f: AlphaNormFamily, vectors, alpha: float,
                                   sampler: SamplerConfig | None = None,
                                   refine_steps: int = 100) -> CollinearityEstimate:
    _check_alpha(alpha)
    sampler = sampler or SamplerConfig()
    V = np.atleast_2d(f.source.space.check(np.asarray(vectors, float)))
    m = V.shape[0]
    if np.linalg.matrix_rank(V, tol=1e-10) < m:
        raise RankError("vectors are linearly dependent at tolerance 1e-10")
    rng = sampler.rng(21)

    w = rng.exponential(size=(sampler.samples, m)) * rng.choice([-1.0, 1.0], (sampler.samples, m))
    coeffs = np.vstack([np.eye(m), w / np.abs(w).sum(axis=1, keepdims=True)])
    values = alpha_norms(f, coeffs @ V, alpha)
    best = int(np.argmin(values))
    a = coeffs[best].copy()
    best_value = float(values[best])

    def value_of(c):
        return alpha_norm(f, c @ V, alpha)

    step = 0.1
    for _ in range(refine_steps):
        improved = False
        for i in range(m):
            for sign in (1.0, -1.0):
                trial = a.copy()
                trial[i] += sign * step
                total = np.abs(trial).sum()
                if total == 0:
                    continue
                trial /= total
                v = value_of(trial)
                if v < best_value:
                    a, best_value, improved = trial, v, True
        if not improved:
            step *= 0.5
    return CollinearityEstimate(
        alpha=alpha, vectors=V.tolist(), c_alpha_estimate=best_value,
        argmin_coefficients=a.tolist(), samples=sampler.samples, refine_steps=refine_steps,
    )
