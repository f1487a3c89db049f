"""Built-in sequences, maps and sets with known crisp behaviour.

Every sequence entry records what the crisp norm says about it (limit,
Cauchy-ness, boundedness), so fuzzy detector verdicts can be compared with an
independent ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .compactness import Ball, FiniteSet
from .continuity import (EPS_GRID, MapSpec, check_ifc_iff_sequential,
                         check_strong_implies_sequential)
from .core import GifPsiNorm
from .errors import DomainError
from .sequences import (CONVERGES, DEFAULT_R_GRID, DEFAULT_T_GRID, DIVERGES, SequenceSpec,
                        _first_index, _tail_len, check_bounded, check_cauchy, check_convergence)


@dataclass(frozen=True)
class CorpusSequence:
    name: str
    spec: SequenceSpec
    candidate: tuple  # limit when convergent, a probe point otherwise
    converges: bool
    cauchy: bool
    bounded: bool


def _alternating_decay(n):
    return np.array([(-1.0) ** n, 1.0 / n])


def _sine(n):
    return np.array([np.sin(n), 0.0])


def _ball_probe(n):
    return np.array([(-1.0) ** n * (1.0 - 1.0 / n), 0.0])


def sequence_corpus() -> list[CorpusSequence]:
    S = SequenceSpec
    return [
        CorpusSequence("harmonic", S.affine_decay([0, 0], [1, 0], "harmonic"), (0, 0), True, True, True),
        CorpusSequence("constant", S.constant([3, 4], "constant"), (3, 4), True, True, True),
        CorpusSequence("shifted", S.affine_decay([1, 2], [1, -1], "shifted"), (1, 2), True, True, True),
        CorpusSequence("geometric-half", S.geometric([1, 0], [1, 1], 0.5, "geometric-half"),
                       (1, 0), True, True, True),
        CorpusSequence("geometric-alternating", S.geometric([0, 1], [1, 0], -0.5,
                                                            "geometric-alternating"),
                       (0, 1), True, True, True),
        CorpusSequence("power-decay", S.power([0, 0], [1, -1], -2, "power-decay"), (0, 0), True, True, True),
        CorpusSequence("diagonal", S.affine_decay([0, 0], [1, 1], "diagonal"), (0, 0), True, True, True),
        CorpusSequence("alternating", S.oscillating([1, 0], [0, 0], [-1, 0], [0, 0], "alternating"),
                       (0, 0), False, False, True),
        CorpusSequence("alternating-decay", S.custom(_alternating_decay, 2, "alternating-decay"),
                       (1, 0), False, False, True),
        CorpusSequence("sine", S.custom(_sine, 2, "sine"), (0, 0), False, False, True),
        CorpusSequence("linear-growth", S.power([0, 0], [1, 0], 1, "linear-growth"), (0, 0),
                       False, False, False),
    ]


def get_sequence(name: str) -> CorpusSequence:
    for entry in sequence_corpus():
        if entry.name == name:
            return entry
    raise DomainError(f"no corpus sequence named {name!r}")


def map_corpus(dim: int = 2) -> dict[str, MapSpec]:
    rot = np.array([[0.0, -1.0], [1.0, 0.0]]) if dim == 2 else np.eye(dim)
    shift = np.eye(dim)[0]
    return {
        "scale2": MapSpec.scaling(2.0, dim, name="scale2"),
        "identity": MapSpec.identity(dim),
        "rotate-shift": MapSpec.affine(rot, shift, name="rotate-shift"),
        "square": MapSpec.componentwise("square", dim, name="square"),
        "sign": MapSpec.componentwise("sign", dim, name="sign"),
        "radial-normalize": MapSpec.componentwise("radial-normalize", dim, name="radial-normalize"),
    }


def set_corpus(dim: int = 2) -> dict[str, object]:
    theta = np.zeros(dim)
    return {
        "unit-ball": Ball(theta, 1.0),
        "open-unit-ball": Ball(theta, 1.0, closed=False),
        "singleton": FiniteSet([theta]),
    }


def probe_corpus(dim: int = 2) -> dict[str, SequenceSpec]:
    e1 = np.eye(dim)[0]
    return {
        "ball-alternating": SequenceSpec.custom(
            lambda n: _ball_probe(n) if dim == 2 else _ball_probe(n)[0] * e1, dim, "ball-alternating"),
        "ball-diagonal": SequenceSpec.affine_decay(np.zeros(dim), np.full(dim, 0.5 / np.sqrt(dim) * np.sqrt(2)),
                                                   "ball-diagonal"),
        "toward-boundary": SequenceSpec.affine_decay(e1, -e1, "toward-boundary"),
        "origin": SequenceSpec.constant(np.zeros(dim), "origin"),
    }


# ---------------------------------------------------------------- crisp oracle


def crisp_radius(n: GifPsiNorm, r: float, t: float) -> float:
    """Crisp distance below which the standard construction meets cell ``(r, t)``."""
    return t * r / ((1.0 - r) * n.k)


def crisp_convergence_verdict(n: GifPsiNorm, s: SequenceSpec, x, r_grid=DEFAULT_R_GRID,
                              t_grid=DEFAULT_T_GRID, N: int = 1000) -> str:
    """The convergence scan rerun on crisp distances ``|x_n - x|`` only."""
    if n.kind != "standard":
        raise DomainError("the crisp oracle needs the standard construction")
    dist = n.space.norms(s.terms(N) - np.asarray(x, float))
    tail = _tail_len(N, 0.1)
    for t in t_grid:
        for r in r_grid:
            n0 = _first_index(dist < crisp_radius(n, r, t))
            if n0 is None or n0 > N - tail + 1:
                return DIVERGES
    return CONVERGES


@dataclass
class AgreementRow:
    name: str
    fuzzy: str
    crisp: str
    truth: str

    @property
    def agrees(self) -> bool:
        return self.fuzzy == self.crisp == self.truth


def detector_agreement(n: GifPsiNorm, N: int = 1000) -> list[AgreementRow]:
    rows = []
    for entry in sequence_corpus():
        fuzzy = check_convergence(n, entry.spec, entry.candidate, N=N).verdict
        crisp = crisp_convergence_verdict(n, entry.spec, entry.candidate, N=N)
        rows.append(AgreementRow(entry.name, fuzzy, crisp, CONVERGES if entry.converges else DIVERGES))
    return rows


# ---------------------------------------------------------------- consistency sweep


@dataclass
class ConsistencyFlag:
    relation: str
    subject: str
    detail: str


def consistency_sweep(n: GifPsiNorm, N: int = 1000, sampler=None,
                      complement_thresholds: bool = False) -> tuple[list[dict], list[ConsistencyFlag]]:
    """Cross-detector implications over the whole corpus.

    Checked: convergent implies Cauchy, Cauchy implies a boundedness
    certificate, strongly continuous implies sequentially continuous, and
    continuous iff sequentially continuous (maps at the origin).
    """
    rows, flags = [], []
    for entry in sequence_corpus():
        conv = check_convergence(n, entry.spec, entry.candidate, N=N)
        cauchy = check_cauchy(n, entry.spec, N=N)
        bound = check_bounded(n, entry.spec, N=N, cauchy=cauchy)
        rows.append({"sequence": entry.name, "convergence": conv.verdict,
                     "cauchy": cauchy.verdict, "bounded": bound.found})
        if conv.positive and not cauchy.positive:
            flags.append(ConsistencyFlag("convergent implies cauchy", entry.name,
                                         f"{conv.verdict} / {cauchy.verdict}"))
        if bound.violation:
            flags.append(ConsistencyFlag("cauchy implies bounded", entry.name, bound.detail))
    x0 = np.zeros(n.dimension)
    for name, f in map_corpus(n.dimension).items():
        strong = check_strong_implies_sequential(f, x0, n, n, N=N, sampler=sampler,
                                                 eps_grid=EPS_GRID)
        iff = check_ifc_iff_sequential(f, x0, n, n, N=N, sampler=sampler,
                                       complement_thresholds=complement_thresholds)
        rows.append({"map": name, "strongly_ifc": strong.first_verdict, "ifc": iff.first_verdict,
                     "sequentially_ifc": iff.second_verdict})
        if strong.violation:
            flags.append(ConsistencyFlag(strong.relation, name, "strong positive, sequential negative"))
        if iff.violation:
            flags.append(ConsistencyFlag(iff.relation, name,
                                         f"ifc {iff.first_verdict}, sequential {iff.second_verdict}"))
    return rows, flags
