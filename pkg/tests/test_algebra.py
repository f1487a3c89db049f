import math

import numpy as np
import pytest

from gifpsi import (CircleOp, PsiFunction, SamplerConfig, TConorm, TNorm, apply_circle,
                    apply_tconorm, apply_tnorm, check_connective_axioms, find_companion_r3,
                    find_companion_r4, find_idempotent_pair)
from gifpsi.errors import DomainError

SMALL = SamplerConfig(samples=1000)


@pytest.mark.parametrize("kind,a,b,expected", [
    ("minimum", 0.3, 0.7, 0.3),
    ("product", 0.4, 1.0, 0.4),
    ("product", 0.5, 0.5, 0.25),
    ("lukasiewicz", 0.7, 0.6, 0.3),
])
def test_tnorm_values(kind, a, b, expected):
    assert apply_tnorm(TNorm(kind), a, b) == pytest.approx(expected)


@pytest.mark.parametrize("kind,a,b,expected", [
    ("maximum", 0.3, 0.7, 0.7),
    ("probabilistic-sum", 0.4, 0.0, 0.4),
    ("probabilistic-sum", 0.5, 0.5, 0.75),
    ("bounded-sum", 0.7, 0.6, 1.0),
])
def test_tconorm_values(kind, a, b, expected):
    assert apply_tconorm(TConorm(kind), a, b) == pytest.approx(expected)


def test_out_of_range_inputs_raise():
    with pytest.raises(DomainError):
        apply_tnorm(TNorm("minimum"), 1.2, 0.5)
    with pytest.raises(DomainError):
        apply_tconorm(TConorm("maximum"), -0.1, 0.5)
    with pytest.raises(DomainError):
        apply_circle(CircleOp("add"), -1.0, 2.0)


def test_circle_values():
    assert apply_circle(CircleOp("add"), 3, 4) == 7
    assert apply_circle(CircleOp("power-mean", n=2), 3, 4) == pytest.approx(5.0)
    assert apply_circle(CircleOp("max"), 2.5, 0) == 2.5


def test_power_mean_one_is_add():
    rng = np.random.default_rng(0)
    s, t = rng.uniform(0, 100, (2, 500))
    np.testing.assert_allclose(CircleOp("power-mean", n=1).evaluate(s, t), s + t)


def test_power_mean_large_exponent_does_not_overflow():
    assert apply_circle(CircleOp("power-mean", n=400), 1e3, 1e3) == pytest.approx(1e3 * 2 ** (1 / 400))


@pytest.mark.parametrize("op", [TNorm("minimum"), TNorm("product"), TNorm("lukasiewicz"),
                                TConorm("maximum"), TConorm("probabilistic-sum"),
                                TConorm("bounded-sum"), CircleOp("add"), CircleOp("max"),
                                CircleOp("power-mean", n=3), PsiFunction("abs"),
                                PsiFunction("abs-power", p=2.0),
                                PsiFunction("rational-example", n=1)])
def test_builtins_pass_their_axioms(op):
    report = check_connective_axioms(op, SMALL)
    assert report.passed, report.failures()


def test_projection_fails_commutativity():
    proj = TNorm.custom(lambda a, b: a, name="projection")
    report = check_connective_axioms(proj, SMALL)
    entry = report.entry("commutativity")
    assert entry.failed
    w = entry.witness
    assert w["a"] != w["b"]
    assert proj(w["a"], w["b"]) != proj(w["b"], w["a"])


def test_rational_example_normalized():
    assert PsiFunction("rational-example", n=1)(1.0) == 1.0
    psi = PsiFunction("rational-example", n=2)
    assert psi(-1.0) == psi(1.0) == 1.0


def test_non_increasing_psi_detected():
    bad = PsiFunction.custom(lambda a: 1.0 / (abs(a) + 1e-9) if a else 0.0, name="inverse")
    report = check_connective_axioms(bad, SMALL)
    assert not report.passed


def test_tnorm_bounded_by_min_and_tconorm_by_max():
    rng = np.random.default_rng(1)
    a, b = rng.random((2, 2000))
    for k in TNorm._builtins:
        assert np.all(TNorm(k).evaluate(a, b) <= np.minimum(a, b) + 1e-15)
    for k in TConorm._builtins:
        assert np.all(TConorm(k).evaluate(a, b) >= np.maximum(a, b) - 1e-15)


@pytest.mark.parametrize("r1,r2,kind", [(0.8, 0.5, "minimum"), (0.9, 0.1, "product"),
                                        (0.6, 0.59, "minimum")])
def test_companion_r3_verified(r1, r2, kind):
    t = TNorm(kind)
    r3 = find_companion_r3(r1, r2, t)
    assert 0 < r3 < 1 and t(r1, r3) > r2


@pytest.mark.parametrize("r1,r2,kind", [(0.8, 0.5, "maximum"), (0.9, 0.1, "probabilistic-sum"),
                                        (0.51, 0.5, "maximum")])
def test_companion_r4_verified(r1, r2, kind):
    s = TConorm(kind)
    r4 = find_companion_r4(r1, r2, s)
    assert 0 < r4 < 1 and s(r4, r2) < r1


def test_companion_requires_ordered_pair():
    with pytest.raises(DomainError):
        find_companion_r3(0.4, 0.5, TNorm("minimum"))


@pytest.mark.parametrize("r5,tk,sk,r6,r7", [
    (0.7, "minimum", "maximum", 0.7, 0.7),
    (0.81, "product", "maximum", 0.9, None),
    (0.5, "minimum", "probabilistic-sum", None, 1 - math.sqrt(0.5)),
])
def test_idempotent_pair(r5, tk, sk, r6, r7):
    t, s = TNorm(tk), TConorm(sk)
    a, b = find_idempotent_pair(r5, t, s)
    assert t(a, a) >= r5 and s(b, b) <= r5
    if r6 is not None:
        assert a == pytest.approx(r6, abs=1e-6)
    if r7 is not None:
        assert b == pytest.approx(r7, abs=1e-6)
