"""Basis expansions, Bolzano-Weierstrass extraction, closure and compactness.

Limits of coordinate tails are estimated by :func:`estimate_tail_limit`: a
plain tail mean when the tail has already settled, otherwise a low-order fit
in ``1/n`` whose constant term is the limit.  A fit is accepted only when its
residual is at round-off level, so a tail that is not of that form is
rejected rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import GifPsiNorm
from .errors import (DomainError, ProbeError, RankError, ReconstructionError, ShapeError,
                     UnboundedError, UnsupportedError)
from .sequences import (CAUCHY, CONVERGES, DEFAULT_R_GRID, DEFAULT_T_GRID, ConvergenceReport,
                        SequenceSpec, check_cauchy, check_convergence, explicit_from)

TAIL_GAP = 1e-8
FIT_DEGREE = 3
SPREAD_TOL = 1e-6
MEMBERSHIP_TOL = 1e-9


# ---------------------------------------------------------------- expansion


@dataclass
class BasisExpansion:
    basis: np.ndarray
    coordinates: np.ndarray  # (N, k): beta_i^(n)
    limits: np.ndarray | None = None
    max_reconstruction_error: float = 0.0

    def reconstruct(self, coords=None) -> np.ndarray:
        c = self.coordinates if coords is None else np.asarray(coords, float)
        return c @ self.basis


def _basis(n: GifPsiNorm, basis) -> np.ndarray:
    d = n.dimension
    B = n.space.basis() if basis is None else np.atleast_2d(np.asarray(basis, float))
    if B.shape != (d, d):
        raise ShapeError(f"basis must hold {d} vectors of dimension {d}, got shape {B.shape}")
    if np.linalg.matrix_rank(B, tol=1e-10) < d:
        raise RankError("basis vectors are linearly dependent")
    return B


def expand(n: GifPsiNorm, s: SequenceSpec, N: int, basis=None) -> BasisExpansion:
    """Coordinates of ``x_1 .. x_N`` in ``basis`` (rows are basis vectors)."""
    if s.dimension != n.dimension:
        raise ShapeError(f"sequence dimension {s.dimension} != space dimension {n.dimension}")
    B = _basis(n, basis)
    X = s.terms(N)
    coords = np.linalg.solve(B.T, X.T).T
    err = float(np.max(np.abs(coords @ B - X))) if X.size else 0.0
    return BasisExpansion(B, coords, max_reconstruction_error=err)


# ---------------------------------------------------------------- tail limits


@dataclass
class TailLimit:
    value: float
    method: str  # "tail-mean" or "extrapolated"
    gap: float
    residual: float = 0.0


def estimate_tail_limit(values, index=None, tail_fraction: float = 0.1,
                        gap_tol: float = TAIL_GAP, degree: int = FIT_DEGREE) -> TailLimit:
    """Limit of a scalar tail, or :class:`ReconstructionError`.

    ``index`` gives the original 1-based positions (defaults to ``1..len``).
    """
    v = np.asarray(values, float)
    idx = np.arange(1, v.size + 1, dtype=float) if index is None else np.asarray(index, float)
    if v.size < 4:
        raise ReconstructionError("need at least 4 terms to estimate a limit")
    if not np.all(np.isfinite(v)):
        raise ReconstructionError("non-finite coordinate values")
    tail = v[-max(2, math.ceil(tail_fraction * v.size)):]
    gap = float(tail.max() - tail.min())
    if gap < gap_tol:
        return TailLimit(float(tail.mean()), "tail-mean", gap)

    half = max(2 * (degree + 1), v.size // 2)
    if half > v.size:
        raise ReconstructionError(f"tail gap {gap:.3g} >= {gap_tol:g} and too few terms to fit")
    vv, ii = v[-half:], idx[-half:]
    u = ii[0] / ii
    A = np.vander(u, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(A, vv, rcond=None)
    resid = float(np.max(np.abs(A @ coef - vv)))
    if resid < gap_tol * max(1.0, float(np.max(np.abs(vv)))):
        return TailLimit(float(coef[0]), "extrapolated", gap, resid)
    raise ReconstructionError(
        f"coordinate tail not settled: gap {gap:.3g}, fit residual {resid:.3g}")


# ---------------------------------------------------------------- reconstruction


@dataclass
class ReconstructionReport:
    limit: list[float]
    coordinate_limits: list[float]
    methods: list[str]
    max_reconstruction_error: float
    cauchy: ConvergenceReport
    convergence: ConvergenceReport

    @property
    def verified(self) -> bool:
        return self.convergence.verdict == CONVERGES


def coordinate_limit_reconstruction(n: GifPsiNorm, s: SequenceSpec, basis=None, N: int = 1000,
                                    r_grid=DEFAULT_R_GRID,
                                    t_grid=DEFAULT_T_GRID) -> ReconstructionReport:
    """Rebuild ``lim x_n`` as ``sum(beta_i e_i)`` from coordinate tail limits."""
    cauchy = check_cauchy(n, s, r_grid, t_grid, N)
    if cauchy.verdict != CAUCHY:
        raise ReconstructionError(f"{s.label()} is not Cauchy up to horizon {N}: {cauchy.verdict}")
    exp = expand(n, s, N, basis)
    tails = [estimate_tail_limit(exp.coordinates[:, i]) for i in range(exp.coordinates.shape[1])]
    beta = np.array([t.value for t in tails])
    exp.limits = beta
    limit = beta @ exp.basis
    conv = check_convergence(n, s, limit, r_grid, t_grid, N)
    return ReconstructionReport(limit.tolist(), beta.tolist(), [t.method for t in tails],
                                exp.max_reconstruction_error, cauchy, conv)


# ---------------------------------------------------------------- subsequences


@dataclass
class SubsequenceResult:
    indices: list[int]  # 1-based positions in the original sequence
    limit: list[float]
    method: str
    halvings: int
    verification: ConvergenceReport

    @property
    def verified(self) -> bool:
        return self.verification.verdict == CONVERGES


def _check_bounded_coords(coords: np.ndarray):
    if not np.all(np.isfinite(coords)):
        raise UnboundedError("non-finite coordinate values")
    N = coords.shape[0]
    early = np.abs(coords[: max(1, N // 4)]).max(axis=0)
    late = np.abs(coords[N // 2:]).max(axis=0)
    grows = late > 2.0 * np.maximum(early, np.finfo(float).tiny)
    grows &= late > 0
    if grows.any():
        i = int(np.flatnonzero(grows)[0])
        raise UnboundedError(
            f"coordinate {i} grows from {early[i]:.3g} to {late[i]:.3g} over the window")


def _try_limits(coords: np.ndarray, keep: np.ndarray):
    try:
        return [estimate_tail_limit(coords[keep, i], keep + 1) for i in range(coords.shape[1])]
    except ReconstructionError:
        return None


def extract_convergent_subsequence(n: GifPsiNorm, s: SequenceSpec, N: int = 1000, basis=None,
                                   min_keep: int = 16, spread_tol: float = SPREAD_TOL,
                                   r_grid=DEFAULT_R_GRID,
                                   t_grid=DEFAULT_T_GRID) -> SubsequenceResult:
    """Coordinate-wise Bolzano-Weierstrass by range halving.

    Each step first asks whether every coordinate along the surviving indices
    already has a reconstructable limit; if not, the coordinate with the
    largest spread is split at its range midpoint and the more populated half
    survives (ties keep the half holding the latest index).  Halving stops when
    all spreads fall below ``spread_tol`` or a half would drop under
    ``min_keep`` terms.
    """
    if min_keep < 10:
        raise DomainError("min_keep must be >= 10 so the result can be verified")
    exp = expand(n, s, N, basis)
    coords = exp.coordinates
    _check_bounded_coords(coords)

    keep = np.arange(N)
    halvings = 0
    method = "halving"
    limits = None
    while True:
        limits = _try_limits(coords, keep)
        if limits is not None:
            method = "tail-limit"
            break
        sub = coords[keep]
        spread = sub.max(axis=0) - sub.min(axis=0)
        if spread.max() < spread_tol:
            method = "spread"
            break
        i = int(np.argmax(spread))
        mid = 0.5 * (sub[:, i].max() + sub[:, i].min())
        low = keep[sub[:, i] <= mid]
        high = keep[sub[:, i] > mid]
        if len(low) == len(high):
            nxt = low if low[-1] > high[-1] else high
        else:
            nxt = low if len(low) > len(high) else high
        if len(nxt) < min_keep:
            break
        keep = nxt
        halvings += 1

    if limits is not None:
        beta = np.array([t.value for t in limits])
    else:
        beta = coords[keep].mean(axis=0)
    limit = beta @ exp.basis
    sub_seq = explicit_from(s.terms(N)[keep], name=f"{s.label()}[subsequence]")
    verification = check_convergence(n, sub_seq, limit, r_grid, t_grid, len(keep))
    return SubsequenceResult((keep + 1).tolist(), limit.tolist(), method, halvings, verification)


# ---------------------------------------------------------------- sets


@dataclass(frozen=True)
class FiniteSet:
    points: tuple

    def __init__(self, points):
        P = np.atleast_2d(np.asarray(points, float))
        object.__setattr__(self, "points", tuple(map(tuple, P.tolist())))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.points, float)

    def contains(self, n: GifPsiNorm, y, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(n.space.norms(self.array - np.asarray(y, float)).min() <= tol)

    def describe(self) -> dict:
        return {"kind": "finite", "points": [list(p) for p in self.points]}


@dataclass(frozen=True)
class Ball:
    """``{y : |y - center| <= radius}`` (or ``<`` when ``closed`` is false)."""

    center: tuple
    radius: float
    closed: bool = True

    def __init__(self, center, radius, closed=True):
        if not radius > 0 or not math.isfinite(radius):
            raise DomainError("ball radius must be finite and > 0")
        object.__setattr__(self, "center", tuple(np.asarray(center, float).ravel().tolist()))
        object.__setattr__(self, "radius", float(radius))
        object.__setattr__(self, "closed", bool(closed))

    def contains(self, n: GifPsiNorm, y, tol: float = MEMBERSHIP_TOL) -> bool:
        dist = n.space.norm(np.asarray(y, float) - np.asarray(self.center))
        return dist <= self.radius + tol if self.closed else dist < self.radius - tol

    def describe(self) -> dict:
        return {"kind": "ball", "center": list(self.center), "radius": self.radius,
                "closed": self.closed}


@dataclass(frozen=True)
class AffineImage:
    """``{A z + b : z in base}`` for an invertible ``A``."""

    A: tuple
    b: tuple
    base: object

    def __init__(self, A, b, base):
        A = np.atleast_2d(np.asarray(A, float))
        if A.shape[0] != A.shape[1] or np.linalg.matrix_rank(A, tol=1e-10) < A.shape[0]:
            raise UnsupportedError("image sets are supported only for invertible square maps")
        if isinstance(base, AffineImage):
            raise UnsupportedError("nested image sets are not supported")
        object.__setattr__(self, "A", tuple(map(tuple, A.tolist())))
        object.__setattr__(self, "b", tuple(np.asarray(b, float).ravel().tolist()))
        object.__setattr__(self, "base", base)

    def pull_back(self, y) -> np.ndarray:
        return np.linalg.solve(np.asarray(self.A), np.asarray(y, float) - np.asarray(self.b))

    def contains(self, n: GifPsiNorm, y, tol: float = MEMBERSHIP_TOL) -> bool:
        # tolerance is applied in the source set; adequate for well-conditioned A
        return self.base.contains(n, self.pull_back(y), tol)

    def describe(self) -> dict:
        return {"kind": "affine-image", "A": [list(r) for r in self.A], "b": list(self.b),
                "base": self.base.describe()}


SET_TYPES = (FiniteSet, Ball, AffineImage)


def _require_set(S):
    if not isinstance(S, SET_TYPES):
        raise UnsupportedError(f"unsupported set spec {type(S).__name__}")


def set_is_closed_and_bounded(S) -> tuple[bool, bool]:
    _require_set(S)
    if isinstance(S, AffineImage):
        return set_is_closed_and_bounded(S.base)
    if isinstance(S, Ball):
        return S.closed, True
    return True, True


# ---------------------------------------------------------------- closure


@dataclass
class ClosureReport:
    x: list[float]
    closure_point: bool
    in_set: bool
    witness_sequence: dict | None = None
    convergence: ConvergenceReport | None = None
    distance: float = 0.0
    mu_upper_bounds: list[dict] = field(default_factory=list)


def _distance_bounds(n: GifPsiNorm, dist: float, t_grid) -> list[dict]:
    if n.kind != "standard":
        return []
    return [{"t": float(t), "mu_upper_bound": float(t) / (float(t) + n.k * dist)} for t in t_grid]


def check_closed_point(n: GifPsiNorm, S, x, r_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID,
                       N: int = 1000) -> ClosureReport:
    """Whether ``x`` is a limit of points of ``S``, with the sequence that shows it.

    Off the closure, ``mu(y - x, t) <= t / (t + k d)`` holds for every
    ``y`` in the set, ``d`` being the crisp distance from ``x`` to the set.
    """
    _require_set(S)
    x = n.space.check(x)
    in_set = S.contains(n, x)

    if isinstance(S, AffineImage):
        if not isinstance(S.base, Ball):
            return check_closed_point(n, FiniteSet(
                [np.asarray(S.A) @ np.asarray(p) + np.asarray(S.b) for p in S.base.points]),
                x, r_grid, t_grid, N)
        A, b = np.asarray(S.A), np.asarray(S.b)
        z = S.pull_back(x)
        c = np.asarray(S.base.center)
        inside = n.space.norm(z - c) <= S.base.radius + MEMBERSHIP_TOL
        if not inside:
            # distance in the image is not the source distance; report only the verdict
            return ClosureReport(x.tolist(), False, in_set)
        seq = SequenceSpec.custom(lambda k: A @ (c + (1.0 - 1.0 / k) * (z - c)) + b, n.dimension,
                                  name="image of in-ball segment")
        conv = check_convergence(n, seq, x, r_grid, t_grid, N)
        return ClosureReport(x.tolist(), conv.verdict == CONVERGES, in_set,
                             {"kind": "image-segment"}, conv)

    if isinstance(S, FiniteSet):
        dists = n.space.norms(S.array - x)
        j = int(np.argmin(dists))
        d = float(dists[j])
        if d <= MEMBERSHIP_TOL:
            seq = SequenceSpec.constant(S.array[j], name="constant at nearest point")
            conv = check_convergence(n, seq, x, r_grid, t_grid, N)
            return ClosureReport(x.tolist(), conv.verdict == CONVERGES, in_set,
                                 {"kind": "constant", "point": S.array[j].tolist()}, conv)
        return ClosureReport(x.tolist(), False, in_set, distance=d,
                             mu_upper_bounds=_distance_bounds(n, d, t_grid))

    c = np.asarray(S.center)
    d_center = n.space.norm(x - c)
    if d_center <= S.radius + MEMBERSHIP_TOL:
        seq = SequenceSpec.affine_decay(x, c - x, name="in-ball segment toward x")
        conv = check_convergence(n, seq, x, r_grid, t_grid, N)
        return ClosureReport(x.tolist(), conv.verdict == CONVERGES, in_set,
                             {"kind": "segment", "from": c.tolist(), "to": x.tolist()}, conv)
    d = d_center - S.radius
    return ClosureReport(x.tolist(), False, in_set, distance=d,
                         mu_upper_bounds=_distance_bounds(n, d, t_grid))


# ---------------------------------------------------------------- compactness


@dataclass
class ProbeOutcome:
    probe: str
    subsequence: SubsequenceResult
    closure: ClosureReport

    @property
    def limit_in_set(self) -> bool:
        return self.closure.in_set


@dataclass
class CompactnessReport:
    verdict: str  # "compatible-with-compact" or "not-compact"
    probes: list[ProbeOutcome]
    closed: bool
    bounded: bool
    set_spec: dict

    @property
    def compatible(self) -> bool:
        return self.verdict == "compatible-with-compact"


def check_compact(n: GifPsiNorm, S, probes, N: int = 1000, r_grid=DEFAULT_R_GRID,
                  t_grid=DEFAULT_T_GRID) -> CompactnessReport:
    """Every probe must have a subsequence whose limit lies in ``S``."""
    _require_set(S)
    outcomes = []
    for p in probes:
        X = p.terms(N)
        for i, xi in enumerate(X):
            if not S.contains(n, xi):
                raise ProbeError(f"probe {p.label()} leaves the set at n={i + 1}: {xi.tolist()}")
        sub = extract_convergent_subsequence(n, p, N, r_grid=r_grid, t_grid=t_grid)
        closure = check_closed_point(n, S, sub.limit, r_grid, t_grid, N)
        outcomes.append(ProbeOutcome(p.label(), sub, closure))
    closed, bounded = set_is_closed_and_bounded(S)
    ok = all(o.limit_in_set and o.subsequence.verified for o in outcomes)
    return CompactnessReport("compatible-with-compact" if ok else "not-compact", outcomes,
                             closed, bounded, S.describe())
