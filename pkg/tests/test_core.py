import numpy as np
import pytest

from gifpsi import (CircleOp, FuzzyConnectives, GifPsiNorm, SamplerConfig, TNorm,
                    VectorSpaceConfig, check_extra_conditions, eval_membership,
                    standard_construction, validate_axioms)
from gifpsi.core import witness_sides
from gifpsi.errors import DomainError, ShapeError

SMALL = SamplerConfig(samples=1000)


def test_standard_values(std2):
    assert std2.mu([3, 4], 5) == 0.5 and std2.nu([3, 4], 5) == 0.5
    assert std2.mu([3, 4], 15) == pytest.approx(0.75)
    m = eval_membership(std2, [0, 0], 1.0)
    assert (m.mu, m.nu) == (1.0, 0.0)
    k2 = standard_construction(VectorSpaceConfig(2), k=2)
    m = eval_membership(k2, [1, 0], 2.0)
    assert (m.mu, m.nu) == (0.5, 0.5)


def test_membership_errors(std2):
    with pytest.raises(DomainError):
        eval_membership(std2, [1, 0], 0.0)
    with pytest.raises(ShapeError):
        eval_membership(std2, [1, 0, 0], 1.0)
    with pytest.raises(DomainError):
        standard_construction(VectorSpaceConfig(2), k=0)


def test_max_norm_space():
    n = standard_construction(VectorSpaceConfig(3, "max"))
    assert n.mu([1, -4, 2], 4) == 0.5


def test_standard_passes_all_axioms(std2):
    report = validate_axioms(std2, SMALL)
    assert [e.axiom for e in report.entries] == ["i", "ii", "iii", "iv", "v", "vi", "vii",
                                                 "viii", "ix", "x", "xi"]
    assert report.passed


def test_circle_max_fails_triangle():
    n = standard_construction(VectorSpaceConfig(2), connectives=FuzzyConnectives(circle=CircleOp("max")))
    report = validate_axioms(n, SMALL)
    entry = report.entry("v")
    assert entry.failed
    assert entry.witness == {"x": [1.0, 0.0], "y": [1.0, 0.0], "s": 1.0, "t": 1.0}
    lhs, rhs = witness_sides(n, "v", entry.witness)
    assert lhs == 0.5 and rhs == pytest.approx(1 / 3)


def test_custom_pair_breaks_axiom_i():
    space = VectorSpaceConfig(2)
    n = GifPsiNorm(space, kind="custom",
                   mu_fn=lambda x, t: t / (t + space.norm(x)),
                   nu_fn=lambda x, t: min(1.0, 2 * space.norm(x) / (t + space.norm(x))))
    report = validate_axioms(n, SamplerConfig(samples=300))
    entry = report.entry("i")
    assert entry.failed
    lhs, rhs = witness_sides(n, "i", entry.witness)
    assert lhs > rhs + 1e-9
    assert n.mu([3, 4], 5) + n.nu([3, 4], 5) == 1.5


def test_every_failure_witness_reproduces():
    n = standard_construction(VectorSpaceConfig(2), connectives=FuzzyConnectives(circle=CircleOp("max")))
    for e in validate_axioms(n, SMALL).failures():
        lhs, rhs = witness_sides(n, e.axiom, e.witness)
        assert lhs == pytest.approx(e.lhs) and rhs == pytest.approx(e.rhs)


def test_extra_conditions(std2):
    rep = check_extra_conditions(std2, SMALL)
    assert rep.entry("xii").status == "pass"
    ev = rep.entry("xiii").evidence
    assert ev["x"] == [1.0, 0.0] and ev["t"] == 1.0 and ev["mu"] == 0.5
    prod = standard_construction(VectorSpaceConfig(2),
                                 connectives=FuzzyConnectives(tnorm=TNorm("product")))
    e = check_extra_conditions(prod, SMALL).entry("xii")
    assert e.failed and e.witness["a"] == 0.5 and e.lhs == 0.25


def test_scaling_and_symmetry(std2):
    rng = np.random.default_rng(3)
    for _ in range(200):
        x = rng.uniform(-5, 5, 2)
        t = rng.uniform(0.1, 10)
        a = rng.uniform(0.1, 10) * rng.choice([-1, 1])
        assert std2.mu(a * x, t) == pytest.approx(std2.mu(x, t / abs(a)), rel=1e-12)
        assert std2.mu(-x, t) == std2.mu(x, t) and std2.nu(-x, t) == std2.nu(x, t)
        assert std2.mu(x, t) + std2.nu(x, t) == pytest.approx(1.0, abs=1e-15)


def test_sampler_config_rejects_bad_values():
    from gifpsi.errors import ConfigError
    with pytest.raises(ConfigError) as exc:
        SamplerConfig(seed="x", tolerance=-1)
    assert "sampler.seed: must be an integer" in exc.value.diagnostics
    assert "sampler.tolerance: must be > 0" in exc.value.diagnostics
