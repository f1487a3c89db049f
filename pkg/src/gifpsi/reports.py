"""Sampler configuration, axiom reports and JSON-safe conversion."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, is_dataclass
from typing import Any

import numpy as np

from .errors import ConfigError

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass(frozen=True)
class SamplerConfig:
    """Seeded sampling parameters for every numerical axiom check.

    ``horizon`` and ``horizon_eps`` implement the finite-horizon surrogate for
    the ``t -> infinity`` limit axioms.  The two ``psi_*`` thresholds are the
    grid-extreme tests for the limits of a scaling function at 0 and infinity.
    """

    seed: int = 42
    samples: int = 10_000
    tolerance: float = 1e-9
    horizon: float = 1e6
    horizon_eps: float = 1e-3
    psi_zero_threshold: float = 0.1
    psi_inf_threshold: float = 10.0

    def __post_init__(self):
        problems = []
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            problems.append("sampler.seed: must be an integer")
        if not isinstance(self.samples, (int, np.integer)) or self.samples < 1:
            problems.append("sampler.samples: must be a positive integer")
        for name in ("tolerance", "horizon", "horizon_eps",
                     "psi_zero_threshold", "psi_inf_threshold"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                problems.append(f"sampler.{name}: must be > 0")
        if problems:
            raise ConfigError(problems)

    def rng(self, stream: int = 0) -> np.random.Generator:
        """Independent generator for a named sub-stream of this seed."""
        return np.random.default_rng([int(self.seed), int(stream)])

    def with_seed(self, seed: int) -> "SamplerConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values["seed"] = seed
        return SamplerConfig(**values)


@dataclass
class AxiomEntry:
    axiom: str
    status: str
    checked: int = 0
    violations: int = 0
    witness: dict | None = None
    evidence: dict | None = None
    lhs: float | None = None
    rhs: float | None = None
    tolerance: float | None = None
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.status == FAIL


@dataclass
class AxiomReport:
    """Per-axiom outcome of a sampled check.

    A failing entry always carries the lowest-index violating sample as its
    witness together with the two sides of the violated relation.
    """

    subject: str
    entries: list[AxiomEntry] = field(default_factory=list)

    def add(self, entry: AxiomEntry) -> AxiomEntry:
        self.entries.append(entry)
        return entry

    @property
    def passed(self) -> bool:
        return all(e.status != FAIL for e in self.entries)

    def failures(self) -> list[AxiomEntry]:
        return [e for e in self.entries if e.status == FAIL]

    def entry(self, axiom: str) -> AxiomEntry:
        for e in self.entries:
            if e.axiom == axiom:
                return e
        raise KeyError(axiom)

    def statuses(self) -> dict[str, str]:
        return {e.axiom: e.status for e in self.entries}

    def to_dict(self) -> dict:
        return to_jsonable(self)


def record_violations(report, axiom, bad, checked, witness_fn, lhs, rhs, tol, note=""):
    """Append an entry for a sampled relation.

    ``bad`` is a boolean mask over sample indices; the lowest violating index
    becomes the witness, built lazily by ``witness_fn(index)``.
    """
    bad = np.asarray(bad, bool)
    count = int(bad.sum())
    if count == 0:
        return report.add(AxiomEntry(axiom, PASS, checked=checked, tolerance=tol, note=note))
    i = int(np.flatnonzero(bad)[0])
    return report.add(AxiomEntry(
        axiom, FAIL, checked=checked, violations=count, witness=to_jsonable(witness_fn(i)),
        lhs=float(np.asarray(lhs)[i]), rhs=float(np.asarray(rhs)[i]), tolerance=tol, note=note,
    ))


def to_jsonable(obj: Any) -> Any:
    """Convert dataclasses, numpy values and tuples into plain JSON types."""
    if is_dataclass(obj) and not isinstance(obj, type):
        if hasattr(obj, "describe"):
            return to_jsonable(obj.describe())
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)
                if f.metadata.get("json", True)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return obj
