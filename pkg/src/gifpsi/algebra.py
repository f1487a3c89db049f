"""T-norms, t-conorms, operations on the half line and scaling functions.

Builtin connectives evaluate by closed formula on numpy arrays.  Custom ones
wrap an arbitrary Python callable and are validated by seeded sampling only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

from .errors import DomainError, SearchExhaustedError
from .reports import AxiomReport, SamplerConfig, record_violations

_COMPANION_GRID = np.arange(1, 1025) / 1025.0


def _vectorized(fn: Callable) -> Callable:
    vec = np.vectorize(fn, otypes=[float])

    def call(*args):
        return vec(*args)

    return call


@dataclass(frozen=True)
class _BinaryConnective:
    kind: str
    fn: Callable | None = field(default=None, compare=False, repr=False)
    name: str = ""

    _builtins: ClassVar[tuple] = ()

    def __post_init__(self):
        if self.kind == "custom":
            if self.fn is None:
                raise DomainError(f"custom {type(self).__name__} needs a function")
        elif self.kind not in self._builtins:
            raise DomainError(f"unknown {type(self).__name__} kind {self.kind!r}")

    @classmethod
    def custom(cls, fn: Callable, name: str = "custom"):
        return cls("custom", fn, name)

    @property
    def label(self) -> str:
        return self.name or self.kind

    def __call__(self, a, b) -> float:
        return float(self.evaluate(np.asarray(a, float), np.asarray(b, float)))

    def evaluate(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind == "custom":
            return _vectorized(self.fn)(a, b)
        return self._formula(a, b)

    def _formula(self, a, b):  # pragma: no cover - overridden
        raise NotImplementedError


@dataclass(frozen=True)
class TNorm(_BinaryConnective):
    """Fuzzy conjunction on [0, 1] with identity 1."""

    _builtins: ClassVar[tuple] = ("minimum", "product", "lukasiewicz")

    def _formula(self, a, b):
        if self.kind == "minimum":
            return np.minimum(a, b)
        if self.kind == "product":
            return a * b
        return np.maximum(a + b - 1.0, 0.0)


@dataclass(frozen=True)
class TConorm(_BinaryConnective):
    """Fuzzy disjunction on [0, 1] with identity 0."""

    _builtins: ClassVar[tuple] = ("maximum", "probabilistic-sum", "bounded-sum")

    def _formula(self, a, b):
        if self.kind == "maximum":
            return np.maximum(a, b)
        if self.kind == "probabilistic-sum":
            return a + b - a * b
        return np.minimum(a + b, 1.0)


@dataclass(frozen=True)
class CircleOp:
    """Combination rule for the time parameters, ``[0, inf)^2 -> [0, inf)``.

    ``power-mean`` with exponent ``n`` is ``(s**n + t**n) ** (1/n)``.
    """

    kind: str
    n: int = 1
    fn: Callable | None = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("add", "max", "power-mean", "custom"):
            raise DomainError(f"unknown CircleOp kind {self.kind!r}")
        if self.kind == "power-mean" and (int(self.n) != self.n or self.n < 1):
            raise DomainError("power-mean exponent must be a positive integer")
        if self.kind == "custom" and self.fn is None:
            raise DomainError("custom CircleOp needs a function")

    @classmethod
    def custom(cls, fn: Callable, name: str = "custom") -> "CircleOp":
        return cls("custom", fn=fn, name=name)

    @property
    def label(self) -> str:
        if self.kind == "power-mean":
            return f"power-mean({self.n})"
        return self.name or self.kind

    def __call__(self, s, t) -> float:
        return float(self.evaluate(np.asarray(s, float), np.asarray(t, float)))

    def evaluate(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        if self.kind == "add":
            return s + t
        if self.kind == "max":
            return np.maximum(s, t)
        if self.kind == "power-mean":
            if self.n == 1:
                return s + t
            n = float(self.n)
            # factor out the larger argument so large n does not overflow
            big = np.maximum(s, t)
            small = np.minimum(s, t)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(big > 0, small / np.where(big > 0, big, 1.0), 0.0)
            return big * (1.0 + ratio**n) ** (1.0 / n)
        return _vectorized(self.fn)(s, t)


@dataclass(frozen=True)
class PsiFunction:
    """Even, normalized, strictly increasing scaling function on the reals.

    ``rational-example`` with parameter ``n`` is ``2 a**(2n) / (|a| + 1)``.
    """

    kind: str
    p: float = 1.0
    n: int = 1
    fn: Callable | None = field(default=None, compare=False, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("abs", "abs-power", "rational-example", "custom"):
            raise DomainError(f"unknown PsiFunction kind {self.kind!r}")
        if self.kind == "abs-power" and not (self.p > 0 and math.isfinite(self.p)):
            raise DomainError("abs-power exponent p must be a positive real")
        if self.kind == "rational-example" and (int(self.n) != self.n or self.n < 1):
            raise DomainError("rational-example parameter n must be a positive integer")
        if self.kind == "custom" and self.fn is None:
            raise DomainError("custom PsiFunction needs a function")

    @classmethod
    def custom(cls, fn: Callable, name: str = "custom") -> "PsiFunction":
        return cls("custom", fn=fn, name=name)

    @property
    def label(self) -> str:
        if self.kind == "abs-power":
            return f"abs-power({self.p})"
        if self.kind == "rational-example":
            return f"rational-example({self.n})"
        return self.name or self.kind

    def __call__(self, a) -> float:
        return float(self.evaluate(np.asarray(a, float)))

    def evaluate(self, a: np.ndarray) -> np.ndarray:
        if self.kind == "abs":
            return np.abs(a)
        if self.kind == "abs-power":
            return np.abs(a) ** self.p
        if self.kind == "rational-example":
            return 2.0 * a ** (2 * int(self.n)) / (np.abs(a) + 1.0)
        return _vectorized(self.fn)(a)


@dataclass(frozen=True)
class FuzzyConnectives:
    """The algebraic environment of a norm: (t-norm, t-conorm, circle, psi)."""

    tnorm: TNorm = field(default_factory=lambda: TNorm("minimum"))
    tconorm: TConorm = field(default_factory=lambda: TConorm("maximum"))
    circle: CircleOp = field(default_factory=lambda: CircleOp("add"))
    psi: PsiFunction = field(default_factory=lambda: PsiFunction("abs"))

    def validate(self, sampler: SamplerConfig | None = None) -> dict[str, AxiomReport]:
        """Run the axiom checker on every member."""
        sampler = sampler or SamplerConfig()
        return {
            "tnorm": check_connective_axioms(self.tnorm, sampler),
            "tconorm": check_connective_axioms(self.tconorm, sampler),
            "circle": check_connective_axioms(self.circle, sampler),
            "psi": check_connective_axioms(self.psi, sampler),
        }

    def describe(self) -> dict:
        return {
            "tnorm": self.tnorm.label,
            "tconorm": self.tconorm.label,
            "circle": self.circle.label,
            "psi": self.psi.label,
        }


def _check_unit(*values):
    for v in values:
        if not (0.0 <= v <= 1.0):
            raise DomainError(f"argument {v!r} is outside [0, 1]")


def apply_tnorm(t: TNorm, a: float, b: float) -> float:
    _check_unit(a, b)
    return t(a, b)


def apply_tconorm(s: TConorm, a: float, b: float) -> float:
    _check_unit(a, b)
    return s(a, b)


def apply_circle(c: CircleOp, s: float, t: float) -> float:
    if not (s >= 0 and t >= 0):
        raise DomainError(f"circle operation needs nonnegative arguments, got {s!r}, {t!r}")
    return c(s, t)


# ---------------------------------------------------------------- axiom checks


def _unit_samples(rng, count):
    forced = np.array([0.0, 1.0, 0.5, 0.2, 0.8, 0.25, 0.75])
    return np.concatenate([forced, rng.random(max(count - forced.size, 0))])[:max(count, 1)]


def _check_binary_unit(op, sampler: SamplerConfig, identity: float, kind: str) -> AxiomReport:
    rng = sampler.rng(1)
    n = sampler.samples
    tol = sampler.tolerance
    a = _unit_samples(rng, n)
    b = rng.permutation(_unit_samples(rng, n))
    c = rng.random(a.size)
    report = AxiomReport(f"{kind} {op.label}")
    ev = op.evaluate

    fab = ev(a, b)
    record_violations(report, "range", (fab < -tol) | (fab > 1 + tol), a.size,
            lambda i: {"a": a[i], "b": b[i]}, fab, np.clip(fab, 0, 1), tol)

    ident = ev(a, np.full_like(a, identity))
    record_violations(report, "identity", np.abs(ident - a) > tol, a.size,
            lambda i: {"a": a[i]}, ident, a, tol, note=f"a op {identity:g} = a")

    fba = ev(b, a)
    record_violations(report, "commutativity", np.abs(fab - fba) > tol, a.size,
            lambda i: {"a": a[i], "b": b[i]}, fab, fba, tol)

    left = ev(a, ev(b, c))
    right = ev(fab, c)
    record_violations(report, "associativity", np.abs(left - right) > tol, a.size,
            lambda i: {"a": a[i], "b": b[i], "c": c[i]}, left, right, tol)

    hi_a = a + (1.0 - a) * rng.random(a.size)
    hi_b = b + (1.0 - b) * rng.random(a.size)
    f_hi = ev(hi_a, hi_b)
    record_violations(report, "monotonicity", fab > f_hi + tol, a.size,
            lambda i: {"a": a[i], "b": b[i], "c": hi_a[i], "d": hi_b[i]}, fab, f_hi, tol,
            note="a<=c, b<=d implies f(a,b) <= f(c,d)")
    return report


def _rel_gap(x, y):
    return np.abs(x - y) / np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))


def _check_circle(op: CircleOp, sampler: SamplerConfig) -> AxiomReport:
    rng = sampler.rng(2)
    n = sampler.samples
    tol = sampler.tolerance
    forced = np.array([0.0, 1.0, 2.5, 3.0, 4.0, 100.0])
    s = np.concatenate([forced, 100.0 * rng.random(max(n - forced.size, 0))])[:n]
    t = rng.permutation(np.concatenate([forced, 100.0 * rng.random(max(n - forced.size, 0))])[:n])
    u = 100.0 * rng.random(s.size)
    report = AxiomReport(f"circle {op.label}")
    ev = op.evaluate

    fst = ev(s, t)
    record_violations(report, "range", ~(fst >= -tol), s.size,
            lambda i: {"s": s[i], "t": t[i]}, fst, np.maximum(fst, 0), tol)
    ident = ev(s, np.zeros_like(s))
    record_violations(report, "identity", _rel_gap(ident, s) > tol, s.size,
            lambda i: {"s": s[i]}, ident, s, tol, note="s op 0 = s")
    fts = ev(t, s)
    record_violations(report, "commutativity", _rel_gap(fst, fts) > tol, s.size,
            lambda i: {"s": s[i], "t": t[i]}, fst, fts, tol)
    left = ev(s, ev(t, u))
    right = ev(fst, u)
    record_violations(report, "associativity", _rel_gap(left, right) > tol, s.size,
            lambda i: {"s": s[i], "t": t[i], "u": u[i]}, left, right, tol)
    hs = s + 10.0 * rng.random(s.size)
    ht = t + 10.0 * rng.random(s.size)
    f_hi = ev(hs, ht)
    record_violations(report, "monotonicity", fst > f_hi + tol * np.maximum(1.0, np.abs(f_hi)), s.size,
            lambda i: {"s": s[i], "t": t[i], "s2": hs[i], "t2": ht[i]}, fst, f_hi, tol)
    return report


def _check_psi(psi: PsiFunction, sampler: SamplerConfig) -> AxiomReport:
    rng = sampler.rng(3)
    tol = sampler.tolerance
    report = AxiomReport(f"psi {psi.label}")

    mags = np.concatenate([[1.0, 0.5, 2.0], 10.0 ** rng.uniform(-3, 3, max(sampler.samples - 3, 0))])
    pos = psi.evaluate(mags)
    neg = psi.evaluate(-mags)
    record_violations(report, "evenness", _rel_gap(pos, neg) > tol, mags.size,
            lambda i: {"t": mags[i]}, neg, pos, tol, note="psi(-t) = psi(t)")

    one = np.array([psi(1.0)])
    record_violations(report, "normalization", np.abs(one - 1.0) > tol, 1,
            lambda i: {"t": 1.0}, one, np.array([1.0]), tol, note="psi(1) = 1")

    grid = np.arange(1, 100_001) * 1e-3
    vals = psi.evaluate(grid)
    step_bad = ~(vals[1:] > vals[:-1])
    record_violations(report, "strict-increase", step_bad, grid.size - 1,
            lambda i: {"t1": grid[i], "t2": grid[i + 1]}, vals[:-1], vals[1:], 0.0,
            note="strict on grid spacing 1e-3 over (0, 100]")

    tiny = np.array([psi(1e-12)])
    record_violations(report, "limit-at-zero", ~(tiny <= sampler.psi_zero_threshold), 1,
            lambda i: {"t": 1e-12}, tiny, np.array([sampler.psi_zero_threshold]), 0.0,
            note="psi(1e-12) <= threshold")
    huge = np.array([psi(1e12)])
    record_violations(report, "limit-at-infinity", ~(huge >= sampler.psi_inf_threshold), 1,
            lambda i: {"t": 1e12}, huge, np.array([sampler.psi_inf_threshold]), 0.0,
            note="psi(1e12) >= threshold")
    return report


def check_connective_axioms(c, sampler: SamplerConfig | None = None) -> AxiomReport:
    """Sample the defining axioms of a connective and report every violation."""
    sampler = sampler or SamplerConfig()
    if isinstance(c, TNorm):
        return _check_binary_unit(c, sampler, 1.0, "tnorm")
    if isinstance(c, TConorm):
        return _check_binary_unit(c, sampler, 0.0, "tconorm")
    if isinstance(c, CircleOp):
        return _check_circle(c, sampler)
    if isinstance(c, PsiFunction):
        return _check_psi(c, sampler)
    raise TypeError(f"not a connective: {c!r}")


# ---------------------------------------------------------------- companions


def _bisect_boundary(pred, bad: float, good: float, max_iter: int = 200) -> float:
    """Shrink ``[bad, good]`` onto the switch point; returns the ``good`` end."""
    for _ in range(max_iter):
        mid = 0.5 * (bad + good)
        if mid == bad or mid == good:
            break
        if pred(mid):
            good = mid
        else:
            bad = mid
    return good


def _feasible_run(pred, what: str):
    """Locate the first run of grid points satisfying ``pred``.

    Returns ``(lower, upper)``: verified feasible points at the two ends of the
    run after refining each interior boundary by bisection.  Runs touching the
    grid edge extend to the open interval end (0 or 1) as a bound instead.
    """
    grid = _COMPANION_GRID
    ok = np.array([pred(float(g)) for g in grid])
    if not ok.any():
        for k in range(1, 61):
            for cand in (1.0 - (1.0 - grid[-1]) / 2**k, grid[0] / 2**k):
                if 0.0 < cand < 1.0 and pred(cand):
                    return cand, cand, (cand, cand)
        raise SearchExhaustedError(f"no {what} found on the grid or by edge refinement")
    i = int(np.argmax(ok))
    j = i
    while j + 1 < grid.size and ok[j + 1]:
        j += 1
    low = _bisect_boundary(pred, float(grid[i - 1]), float(grid[i])) if i > 0 else None
    high = _bisect_boundary(pred, float(grid[j + 1]), float(grid[j])) if j + 1 < grid.size else None
    lo_bound = 0.0 if low is None else low
    hi_bound = 1.0 if high is None else high
    return low, high, (lo_bound, hi_bound)


def _verified(pred, candidates, what):
    for cand in candidates:
        if cand is not None and 0.0 < cand < 1.0 and pred(cand):
            return float(cand)
    raise SearchExhaustedError(f"{what}: no candidate survived re-verification")


def _check_pair(r1, r2):
    if not (0.0 < r2 < r1 < 1.0):
        raise DomainError(f"need 0 < r2 < r1 < 1, got r1={r1!r}, r2={r2!r}")


def find_companion_r3(r1: float, r2: float, t: TNorm) -> float:
    """Some ``r3`` in (0, 1) with ``t(r1, r3) > r2``.

    The returned point sits midway inside the feasible interval so that the
    strict inequality survives rounding.
    """
    _check_pair(r1, r2)
    pred = lambda r: t(r1, r) > r2  # noqa: E731
    low, high, (lo, hi) = _feasible_run(pred, "r3")
    return _verified(pred, [0.5 * (lo + hi), low, high], "r3")


def find_companion_r4(r1: float, r2: float, s: TConorm) -> float:
    """Some ``r4`` in (0, 1) with ``s(r4, r2) < r1``."""
    _check_pair(r1, r2)
    pred = lambda r: s(r, r2) < r1  # noqa: E731
    low, high, (lo, hi) = _feasible_run(pred, "r4")
    return _verified(pred, [0.5 * (lo + hi), low, high], "r4")


def find_idempotent_pair(r5: float, t: TNorm, s: TConorm) -> tuple[float, float]:
    """``(r6, r7)`` with ``t(r6, r6) >= r5`` and ``s(r7, r7) <= r5``.

    Both are the tight boundary values, e.g. ``(r5, r5)`` for min/max.
    """
    if not (0.0 < r5 < 1.0):
        raise DomainError(f"need 0 < r5 < 1, got {r5!r}")
    p6 = lambda r: t(r, r) >= r5  # noqa: E731
    p7 = lambda r: s(r, r) <= r5  # noqa: E731
    low6, high6, (lo6, hi6) = _feasible_run(p6, "r6")
    low7, high7, (lo7, hi7) = _feasible_run(p7, "r7")
    r6 = _verified(p6, [low6, 0.5 * (lo6 + hi6), high6], "r6")
    r7 = _verified(p7, [high7, 0.5 * (lo7 + hi7), low7], "r7")
    return r6, r7
