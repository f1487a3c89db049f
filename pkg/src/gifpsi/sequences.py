"""Convergence, Cauchy and boundedness detectors for concrete sequences.

Every "for all n >= n0" claim is checked on the finite window ``[n0, N]`` and
reports say so ("up to horizon N").  A grid cell is certified only when the
admissible tail covers at least ``tail_fraction`` of the window, so a lucky
final term cannot certify convergence on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import GifPsiNorm
from .errors import DomainError, PreconditionError, ShapeError

DEFAULT_R_GRID = (0.1, 0.2, 0.5)
DEFAULT_T_GRID = (0.5, 1.0, 2.0)
DEFAULT_T_SEARCH_GRID = (0.1, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6)
DEFAULT_R_SEARCH_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
TAIL_FRACTION = 0.1
LIMIT_FORM_EPS = 1e-2
IMPROVING_RATIO = 0.75

CONVERGES, DIVERGES, INCONCLUSIVE = "converges", "diverges", "inconclusive"
CAUCHY, NOT_CAUCHY = "cauchy", "not-cauchy"

KINDS = ("affine-decay", "geometric", "oscillating", "power", "trigonometric", "explicit", "custom")


def _arr(v, d=None):
    a = np.asarray(v, float).ravel()
    if d is not None and a.size != d:
        raise ShapeError(f"expected a vector of dimension {d}, got {a.size}")
    return a


@dataclass(frozen=True)
class SequenceSpec:
    """A vector sequence ``x_1, x_2, ...`` evaluable up to any horizon.

    Closed-form kinds (``n`` is the 1-based index):

    * ``affine-decay``: ``base + direction / n``
    * ``geometric``: ``base + direction * q**n``
    * ``oscillating``: ``even_base + even_direction / n`` on even ``n``, the
      ``odd_*`` pair on odd ``n``
    * ``power``: ``base + direction * n**exponent``
    * ``trigonometric``: ``center + (amplitude + decay / n) * cos(frequency * n + phase)``
      componentwise
    * ``explicit``: a finite list of terms
    * ``custom``: ``fn(n) -> vector``
    """

    kind: str
    dimension: int
    params: dict = field(default_factory=dict, compare=False)
    fn: Callable | None = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "custom" and self.fn is None:
            raise DomainError("custom sequence needs fn")

    # constructors -----------------------------------------------------------
    @classmethod
    def affine_decay(cls, base, direction, name=""):
        base = _arr(base)
        return cls("affine-decay", base.size, {"base": base.tolist(),
                                               "direction": _arr(direction, base.size).tolist()}, name=name)

    @classmethod
    def geometric(cls, base, direction, q, name=""):
        base = _arr(base)
        return cls("geometric", base.size, {"base": base.tolist(),
                                            "direction": _arr(direction, base.size).tolist(),
                                            "q": float(q)}, name=name)

    @classmethod
    def oscillating(cls, even_base, even_direction, odd_base, odd_direction, name=""):
        eb = _arr(even_base)
        d = eb.size
        return cls("oscillating", d, {"even_base": eb.tolist(),
                                      "even_direction": _arr(even_direction, d).tolist(),
                                      "odd_base": _arr(odd_base, d).tolist(),
                                      "odd_direction": _arr(odd_direction, d).tolist()}, name=name)

    @classmethod
    def power(cls, base, direction, exponent, name=""):
        base = _arr(base)
        return cls("power", base.size, {"base": base.tolist(),
                                        "direction": _arr(direction, base.size).tolist(),
                                        "exponent": float(exponent)}, name=name)

    @classmethod
    def trigonometric(cls, center, amplitude, decay=None, frequency=None, phase=None, name=""):
        c = _arr(center)
        d = c.size
        return cls("trigonometric", d, {
            "center": c.tolist(),
            "amplitude": _arr(amplitude, d).tolist(),
            "decay": _arr(np.zeros(d) if decay is None else decay, d).tolist(),
            "frequency": _arr(np.ones(d) if frequency is None else frequency, d).tolist(),
            "phase": _arr(np.zeros(d) if phase is None else phase, d).tolist(),
        }, name=name)

    @classmethod
    def explicit(cls, terms, name=""):
        T = np.atleast_2d(np.asarray(terms, float))
        return cls("explicit", T.shape[1], {"terms": T}, name=name)

    @classmethod
    def constant(cls, value, name=""):
        v = _arr(value)
        return cls.affine_decay(v, np.zeros(v.size), name=name)

    @classmethod
    def custom(cls, fn, dimension, name=""):
        return cls("custom", dimension, {}, fn=fn, name=name)

    # evaluation ---------------------------------------------------------------
    @property
    def length(self) -> float:
        if self.kind == "explicit":
            return len(self.params["terms"])
        return math.inf

    def terms(self, N: int) -> np.ndarray:
        """Rows ``x_1 .. x_N``."""
        if N < 1:
            raise DomainError("horizon must be >= 1")
        if N > self.length:
            raise DomainError(f"explicit sequence has {self.length} terms, horizon {N} requested")
        n = np.arange(1, N + 1, dtype=float)[:, None]
        p = {k: (np.asarray(v, float) if not isinstance(v, float) else v) for k, v in self.params.items()}
        if self.kind == "affine-decay":
            return p["base"] + p["direction"] / n
        if self.kind == "geometric":
            return p["base"] + p["direction"] * np.power(p["q"], n)
        if self.kind == "power":
            return p["base"] + p["direction"] * np.power(n, p["exponent"])
        if self.kind == "oscillating":
            even = p["even_base"] + p["even_direction"] / n
            odd = p["odd_base"] + p["odd_direction"] / n
            return np.where((n % 2) == 0, even, odd)
        if self.kind == "trigonometric":
            return p["center"] + (p["amplitude"] + p["decay"] / n) * np.cos(p["frequency"] * n + p["phase"])
        if self.kind == "explicit":
            return np.asarray(p["terms"], float)[:N]
        return np.vstack([_arr(self.fn(i), self.dimension) for i in range(1, N + 1)])

    def term(self, n: int) -> np.ndarray:
        return self.terms(n)[-1]

    def label(self) -> str:
        return self.name or self.kind

    def describe(self) -> dict:
        out = {"kind": self.kind, "dimension": self.dimension, "name": self.name}
        if self.kind == "explicit":
            out["length"] = self.length
        elif self.kind != "custom":
            out.update({k: v for k, v in self.params.items()})
        return out


def explicit_from(terms, name: str = "") -> SequenceSpec:
    return SequenceSpec.explicit(terms, name=name)


# ---------------------------------------------------------------- reports


@dataclass
class CellResult:
    r: float
    t: float
    n0: int | None
    certified: bool
    trend: str = ""


@dataclass
class ConvergenceReport:
    """Outcome of a convergence or Cauchy scan on a finite window.

    ``cells`` has one row per ``(r, t)``; ``n0`` is the first index from which
    the defining inequalities hold on the rest of the window.
    """

    mode: str
    verdict: str
    horizon: int
    candidate_limit: list[float] | None
    cells: list[CellResult]
    limit_form: list[dict] = field(default_factory=list)
    trajectories: list[dict] = field(default_factory=list)
    p_max: int | None = None
    label: str = ""

    @property
    def positive(self) -> bool:
        return self.verdict in (CONVERGES, CAUCHY)

    def n0(self, r: float, t: float) -> int | None:
        for c in self.cells:
            if c.r == r and c.t == t:
                return c.n0
        raise KeyError((r, t))

    def rows(self) -> list[dict]:
        return [{"r": c.r, "t": c.t, "n0": c.n0, "verdict": "certified" if c.certified else "open"}
                for c in self.cells]


def _validate_grids(r_grid, t_grid, N):
    r_grid = tuple(float(r) for r in r_grid)
    t_grid = tuple(float(t) for t in t_grid)
    if not r_grid or not t_grid:
        raise DomainError("r and t grids must be nonempty")
    if any(not (0 < r < 1) for r in r_grid):
        raise DomainError("r values must lie in (0, 1)")
    if any(not t > 0 for t in t_grid):
        raise DomainError("t values must be > 0")
    if N < 10:
        raise DomainError("horizon N must be >= 10")
    return r_grid, t_grid


def _tail_len(N: int, tail_fraction: float) -> int:
    return max(1, math.ceil(tail_fraction * N))


def _first_index(ok_rows: np.ndarray) -> int | None:
    """1-based first index from which every row is ok, or ``None``."""
    if not ok_rows[-1]:
        return None
    bad = np.flatnonzero(~ok_rows)
    return 1 if bad.size == 0 else int(bad[-1]) + 2


def _improving(deficit: np.ndarray, asymptote_ratio: float = IMPROVING_RATIO) -> bool:
    """Whether a failure deficit is still heading to zero over the last half.

    The half must be nonincreasing and strictly shrinking, and the asymptote of
    a fit ``a + b / n`` must sit below ``asymptote_ratio`` times the final
    deficit; a deficit settling on a positive floor is therefore stalled.
    """
    half = deficit[deficit.size // 2:]
    if half.size < 3:
        return False
    if not (np.all(np.diff(half) <= 1e-15) and half[-1] < half[0]):
        return False
    idx = np.arange(deficit.size // 2 + 1, deficit.size + 1, dtype=float)
    A = np.column_stack([np.ones_like(idx), idx[0] / idx])
    (a, _), *_ = np.linalg.lstsq(A, half, rcond=None)
    return bool(a <= 0 or a < asymptote_ratio * half[-1])


def _sample_indices(N: int, count: int = 20) -> np.ndarray:
    idx = np.unique(np.round(np.geomspace(1, N, count)).astype(int))
    return idx


def _verdict(cells, positive, negative):
    if all(c.certified for c in cells):
        return positive
    if any(not c.certified and c.trend == "improving" for c in cells) and \
            not any(not c.certified and c.trend == "stalled" for c in cells):
        return INCONCLUSIVE
    return negative


def _scan(mu_by_t, nu_by_t, r_grid, t_grid, N, tail_fraction, trend_by_t=None):
    """Per-cell n0 and certification; ``trend_by_t`` optionally supplies the
    ``(mu, nu)`` rows used to judge whether an open cell is still improving."""
    tail = _tail_len(N, tail_fraction)
    cells = []
    for t in t_grid:
        mu, nu = mu_by_t[t], nu_by_t[t]
        for r in r_grid:
            ok = (mu > 1.0 - r) & (nu < r)
            n0 = _first_index(ok)
            certified = n0 is not None and n0 <= N - tail + 1
            trend = ""
            if not certified:
                tmu, tnu = (mu, nu) if trend_by_t is None else trend_by_t[t]
                deficit = np.maximum((1.0 - r) - tmu, 0.0) + np.maximum(tnu - r, 0.0)
                deficit = np.where(np.isfinite(deficit), deficit, 0.0)
                trend = "improving" if _improving(deficit) else "stalled"
            cells.append(CellResult(r, t, n0, certified, trend))
    return cells


def check_convergence(n: GifPsiNorm, s: SequenceSpec, x, r_grid=DEFAULT_R_GRID,
                      t_grid=DEFAULT_T_GRID, N: int = 1000,
                      tail_fraction: float = TAIL_FRACTION,
                      limit_eps: float = LIMIT_FORM_EPS) -> ConvergenceReport:
    """Scan ``mu(x_n - x, t) > 1 - r`` and ``nu(x_n - x, t) < r`` per grid cell.

    ``inconclusive`` means some cell is uncertified while its deficit is still
    strictly shrinking at the horizon; ``diverges`` means it has stalled.
    """
    r_grid, t_grid = _validate_grids(r_grid, t_grid, N)
    x = n.space.check(x)
    if s.dimension != n.dimension:
        raise ShapeError(f"sequence dimension {s.dimension} != space dimension {n.dimension}")
    D = s.terms(N) - x
    mu_by_t, nu_by_t = {}, {}
    for t in t_grid:
        mu_by_t[t], nu_by_t[t] = n.batch(D, t)
    cells = _scan(mu_by_t, nu_by_t, r_grid, t_grid, N, tail_fraction)
    idx = _sample_indices(N)
    limit_form, traj = [], []
    for t in t_grid:
        mu_N, nu_N = float(mu_by_t[t][-1]), float(nu_by_t[t][-1])
        limit_form.append({"t": t, "mu_at_horizon": mu_N, "nu_at_horizon": nu_N,
                           "eps": limit_eps,
                           "holds": mu_N >= 1.0 - limit_eps and nu_N <= limit_eps})
        traj.append({"t": t, "n": idx.tolist(), "mu": mu_by_t[t][idx - 1].tolist(),
                     "nu": nu_by_t[t][idx - 1].tolist()})
    return ConvergenceReport(
        mode="convergence", verdict=_verdict(cells, CONVERGES, DIVERGES), horizon=N,
        candidate_limit=x.tolist(), cells=cells, limit_form=limit_form, trajectories=traj,
        label=f"up to horizon N={N}",
    )


def check_cauchy(n: GifPsiNorm, s: SequenceSpec, r_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID,
                 N: int = 1000, p_max: int | None = None,
                 tail_fraction: float = TAIL_FRACTION) -> ConvergenceReport:
    """Cauchy scan in offset form: pairs ``(n, n + p)`` with ``1 <= p <= p_max``.

    Row ``n`` holds when every admissible offset keeps ``mu > 1 - r`` and
    ``nu < r``; ``n0`` is the first row from which all later rows hold.
    """
    r_grid, t_grid = _validate_grids(r_grid, t_grid, N)
    if s.dimension != n.dimension:
        raise ShapeError(f"sequence dimension {s.dimension} != space dimension {n.dimension}")
    p_max = N - 1 if p_max is None else int(p_max)
    if p_max < 1:
        raise DomainError("p_max must be >= 1")
    p_max = min(p_max, N - 1)
    X = s.terms(N)
    min_mu = {t: np.full(N, np.inf) for t in t_grid}
    max_nu = {t: np.full(N, -np.inf) for t in t_grid}
    # rows 1..N/2 against the same number of offsets, so the trend of an open
    # cell is not flattered by rows that run out of partners at the horizon
    half = N // 2
    trend = None
    for p in range(1, p_max + 1):
        diff = X[p:] - X[:-p]
        for t in t_grid:
            mu, nu = n.batch(diff, t)
            np.minimum(min_mu[t][:N - p], mu, out=min_mu[t][:N - p])
            np.maximum(max_nu[t][:N - p], nu, out=max_nu[t][:N - p])
        if p == min(half, p_max):
            trend = {t: (min_mu[t][:half].copy(), max_nu[t][:half].copy()) for t in t_grid}
    # the final row has no partner; treat it as satisfied
    for t in t_grid:
        min_mu[t][-1] = 1.0
        max_nu[t][-1] = 0.0
    cells = _scan(min_mu, max_nu, r_grid, t_grid, N, tail_fraction, trend)
    idx = _sample_indices(N)
    traj = [{"t": t, "n": idx.tolist(), "worst_mu": min_mu[t][idx - 1].tolist(),
             "worst_nu": max_nu[t][idx - 1].tolist()} for t in t_grid]
    return ConvergenceReport(
        mode="cauchy", verdict=_verdict(cells, CAUCHY, NOT_CAUCHY), horizon=N,
        candidate_limit=None, cells=cells, trajectories=traj, p_max=p_max,
        label=f"up to horizon N={N}, offsets 1..{p_max}",
    )


@dataclass
class ConsistencyReport:
    """Two detector outcomes and whether their combination is forbidden."""

    relation: str
    first: object
    second: object
    violation: bool
    detail: str = ""


def check_convergent_implies_cauchy(n: GifPsiNorm, s: SequenceSpec, x, r_grid=DEFAULT_R_GRID,
                                    t_grid=DEFAULT_T_GRID, N: int = 1000,
                                    p_max: int | None = None) -> ConsistencyReport:
    conv = check_convergence(n, s, x, r_grid, t_grid, N)
    cauchy = check_cauchy(n, s, r_grid, t_grid, N, p_max)
    violation = conv.verdict == CONVERGES and cauchy.verdict != CAUCHY
    return ConsistencyReport("convergent implies cauchy", conv, cauchy, violation,
                             f"{conv.verdict} / {cauchy.verdict}")


@dataclass
class ArithmeticReport:
    sum_report: ConvergenceReport
    scaled_report: ConvergenceReport
    expected_sum: list[float]
    expected_scaled: list[float]

    @property
    def violation(self) -> bool:
        return not (self.sum_report.verdict == CONVERGES and self.scaled_report.verdict == CONVERGES)


def check_limit_arithmetic(n: GifPsiNorm, s1: SequenceSpec, s2: SequenceSpec, x, y, c: float,
                           r_grid=DEFAULT_R_GRID, t_grid=DEFAULT_T_GRID,
                           N: int = 1000) -> ArithmeticReport:
    """Limits of ``x_n + y_n`` and ``c x_n`` once ``x_n -> x`` and ``y_n -> y`` hold."""
    if c == 0:
        raise DomainError("scalar must be nonzero")
    x = n.space.check(x)
    y = n.space.check(y)
    for label, seq, lim in (("s1", s1, x), ("s2", s2, y)):
        pre = check_convergence(n, seq, lim, r_grid, t_grid, N)
        if pre.verdict != CONVERGES:
            raise PreconditionError(f"{label} ({seq.label()}) does not converge to {lim.tolist()}: {pre.verdict}")
    T1, T2 = s1.terms(N), s2.terms(N)
    sum_seq = explicit_from(T1 + T2, name=f"{s1.label()}+{s2.label()}")
    scaled = explicit_from(c * T1, name=f"{c:g}*{s1.label()}")
    return ArithmeticReport(
        check_convergence(n, sum_seq, x + y, r_grid, t_grid, N),
        check_convergence(n, scaled, c * x, r_grid, t_grid, N),
        (x + y).tolist(), (c * x).tolist(),
    )


def check_limit_uniqueness(n: GifPsiNorm, s: SequenceSpec, x, y, r_grid=DEFAULT_R_GRID,
                           t_grid=DEFAULT_T_GRID, N: int = 1000) -> ConsistencyReport:
    x = n.space.check(x)
    y = n.space.check(y)
    if np.array_equal(x, y):
        raise DomainError("uniqueness check needs two distinct candidates")
    a = check_convergence(n, s, x, r_grid, t_grid, N)
    b = check_convergence(n, s, y, r_grid, t_grid, N)
    violation = a.verdict == CONVERGES and b.verdict == CONVERGES
    return ConsistencyReport("limit uniqueness", a, b, violation, f"{a.verdict} / {b.verdict}")


@dataclass
class BoundednessCertificate:
    """A single ``(t, r)`` witnessing boundedness of ``x_1 .. x_N``, if any."""

    found: bool
    t: float | None
    r: float | None
    horizon: int
    worst_mu: float | None = None
    worst_nu: float | None = None
    violation: bool = False
    detail: str = ""


def check_bounded(n: GifPsiNorm, s: SequenceSpec, N: int = 1000,
                  t_search_grid=DEFAULT_T_SEARCH_GRID, r_search_grid=DEFAULT_R_SEARCH_GRID,
                  cauchy: ConvergenceReport | None = None) -> BoundednessCertificate:
    """Search ``(t, r)`` with ``mu(x_n, t) > 1 - r`` and ``nu(x_n, t) < r`` for all n.

    The strictest ``r`` is tried first.  When ``cauchy`` is a positive Cauchy
    report and nothing is found, the certificate is flagged as a violation of
    the rule that Cauchy sequences are bounded.
    """
    if not t_search_grid or not r_search_grid:
        raise DomainError("search grids must be nonempty")
    X = s.terms(N)
    found = None
    for r in sorted(float(v) for v in r_search_grid):
        for t in sorted(float(v) for v in t_search_grid):
            mu, nu = n.batch(X, t)
            if np.all(mu > 1.0 - r) and np.all(nu < r):
                found = (t, r, float(mu.min()), float(nu.max()))
                break
        if found:
            break
    if found:
        return BoundednessCertificate(True, found[0], found[1], N, found[2], found[3])
    violation = cauchy is not None and cauchy.verdict == CAUCHY
    return BoundednessCertificate(False, None, None, N, violation=violation,
                                  detail="cauchy sequence without certificate" if violation else "")
