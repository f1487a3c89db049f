import numpy as np
import pytest

from gifpsi import (Ball, FiniteSet, MapSpec, SamplerConfig, SequenceSpec, check_compact_image,
                    check_ifc, check_ifc_iff_sequential, check_sequentially_ifc,
                    check_strong_implies_sequential, check_strongly_ifc)
from gifpsi.errors import PreconditionError, UnsupportedError

X0 = np.zeros(2)
FAMILY = [SequenceSpec.affine_decay([0, 0], [1, 0], "harmonic")]
SCALE2 = MapSpec.scaling(2.0, 2)
IDENT = MapSpec.identity(2)
RADIAL = MapSpec.componentwise("radial-normalize", 2)


def test_sequential(std2):
    assert check_sequentially_ifc(SCALE2, X0, std2, std2, FAMILY).verdict
    assert check_sequentially_ifc(IDENT, [1, 2], std2, std2).verdict
    neg = check_sequentially_ifc(RADIAL, X0, std2, std2, FAMILY)
    assert not neg.verdict and neg.members[0]["image_at_horizon"] == [1.0, 0.0]


def test_sequential_precondition(std2):
    with pytest.raises(PreconditionError, match="harmonic"):
        check_sequentially_ifc(SCALE2, [1, 1], std2, std2, FAMILY)


def test_retained_witness_keeps_negative(std2):
    neg = check_sequentially_ifc(RADIAL, X0, std2, std2, FAMILY)
    more = check_sequentially_ifc(RADIAL, X0, std2, std2, None, retained_witnesses=neg.failing)
    assert not more.verdict


def test_strong_linear_bound(std2):
    for A, L in ((2 * np.eye(2), 2.0), (np.array([[1.0, 2.0], [0.0, 1.0]]), None)):
        f = MapSpec.linear(A)
        L = L or np.linalg.norm(A, 2)
        rep = check_strongly_ifc(f, X0, std2, std2, eps_grid=(0.5, 1.0, 2.0))
        assert rep.verdict
        for row in rep.table:
            assert row["delta"] <= row["eps"] / L * (1 + 1e-12)


def test_strong_identity_equality(std2):
    rep = check_strongly_ifc(IDENT, X0, std2, std2, eps_grid=(1.0,), delta_search_grid=(0.5, 1.0))
    assert rep.table[0]["delta"] == 1.0


def test_strong_radial_witness(std2):
    rep = check_strongly_ifc(RADIAL, X0, std2, std2, eps_grid=(1.0,))
    assert not rep.verdict
    w = rep.table[0]["witness"]
    assert w["mu_V"] == pytest.approx(0.5) and w["mu_U"] > 0.5


def test_ifc_examples(std2):
    r = check_ifc(SCALE2, X0, std2, std2, 1.0, 0.5, delta_grid=(0.5,), beta_grid=(0.5,))
    assert r.verdict and (r.delta, r.beta) == (0.5, 0.5)
    r = check_ifc(IDENT, X0, std2, std2, 1.0, 0.5, delta_grid=(1.0,), beta_grid=(0.5,))
    assert r.verdict
    neg = check_ifc(RADIAL, X0, std2, std2, 1.0, 0.6)
    assert not neg.verdict and neg.counterexample["mu_V"] == pytest.approx(0.5)
    assert np.linalg.norm(neg.counterexample["x"]) > 0


def test_ifc_compat_switch(std2):
    r = check_ifc(SCALE2, X0, std2, std2, 1.0, 0.5, complement_thresholds=True)
    assert r.verdict and r.form == "complement"


@pytest.mark.parametrize("f,expected", [(SCALE2, True), (RADIAL, False), (IDENT, True)])
def test_consistency(std2, f, expected):
    small = SamplerConfig(samples=500)
    iff = check_ifc_iff_sequential(f, X0, std2, std2, FAMILY, sampler=small)
    strong = check_strong_implies_sequential(f, X0, std2, std2, FAMILY, sampler=small)
    assert not iff.violation and not strong.violation
    assert iff.first_verdict == iff.second_verdict == expected
    assert strong.first_verdict == expected


def test_compact_images(std2):
    ball = Ball([0, 0], 1.0)
    probe = SequenceSpec.custom(lambda n: [(-1.0) ** n * (1 - 1 / n), 0], 2)
    rep = check_compact_image(SCALE2, std2, std2, ball, [probe])
    assert rep.compatible
    np.testing.assert_allclose(np.abs(rep.image.probes[0].subsequence.limit), [2, 0], atol=1e-9)
    fin = FiniteSet([[1, 0], [0, 1]])
    assert check_compact_image(IDENT, std2, std2, fin, [SequenceSpec.constant([1, 0])]).compatible
    rot = MapSpec.affine([[0, -1], [1, 0]], [1, 0])
    spiral = SequenceSpec.custom(lambda n: (1 - 1 / n) * np.array([np.cos(n), np.sin(n)]), 2)
    rep = check_compact_image(rot, std2, std2, ball, [spiral])
    lim = np.array(rep.image.probes[0].subsequence.limit)
    assert np.linalg.norm(lim - [1, 0]) <= 1 + 1e-9 and rep.compatible
    with pytest.raises(UnsupportedError):
        check_compact_image(MapSpec.componentwise("square", 2), std2, std2, ball, [probe])
