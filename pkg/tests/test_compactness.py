import numpy as np
import pytest

from gifpsi import (AffineImage, Ball, FiniteSet, SequenceSpec, check_closed_point, check_compact,
                    coordinate_limit_reconstruction, expand, extract_convergent_subsequence)
from gifpsi.compactness import estimate_tail_limit
from gifpsi.errors import (ProbeError, RankError, ReconstructionError, UnboundedError,
                           UnsupportedError)

ALT_DECAY = SequenceSpec.custom(lambda n: [(-1.0) ** n, 1.0 / n], 2, "alt-decay")
BALL_ALT = SequenceSpec.custom(lambda n: [(-1.0) ** n * (1 - 1.0 / n), 0.0], 2, "ball-alt")


def test_expansion_in_skew_basis(std2):
    s = SequenceSpec.affine_decay([0, 0], [1, 1])
    exp = expand(std2, s, 50, basis=[[1, 1], [1, -1]])
    np.testing.assert_allclose(exp.coordinates[:, 0], 1 / np.arange(1, 51))
    np.testing.assert_allclose(exp.coordinates[:, 1], 0, atol=1e-15)
    assert exp.max_reconstruction_error < 1e-14
    with pytest.raises(RankError):
        expand(std2, s, 50, basis=[[1, 1], [2, 2]])


def test_tail_limit_methods():
    n = np.arange(1, 1001)
    assert estimate_tail_limit(np.full(1000, 3.0)).method == "tail-mean"
    fit = estimate_tail_limit(2 - 1 / n + 3 / n ** 2)
    assert fit.method == "extrapolated" and abs(fit.value - 2) < 1e-10
    with pytest.raises(ReconstructionError):
        estimate_tail_limit(np.sin(n))


def test_subsequence_even_indices(std2):
    res = extract_convergent_subsequence(std2, ALT_DECAY, 1000)
    assert res.indices == list(range(2, 1001, 2))
    np.testing.assert_allclose(res.limit, [1, 0], atol=1e-9)
    assert res.verified


def test_subsequence_constant(std2):
    res = extract_convergent_subsequence(std2, SequenceSpec.constant([3, 4]), 200)
    assert res.indices == list(range(1, 201)) and res.limit == [3.0, 4.0]


def test_subsequence_sine(std2):
    s = SequenceSpec.trigonometric([0, 0], [1, 0], phase=[-np.pi / 2, 0])
    res = extract_convergent_subsequence(std2, s, 1000)
    assert abs(res.limit[0]) <= 1 and res.limit[1] == 0
    assert res.verified and len(res.indices) >= 16


def test_subsequence_unbounded(std2):
    with pytest.raises(UnboundedError):
        extract_convergent_subsequence(std2, SequenceSpec.power([0, 0], [1, 0], 1), 1000)


@pytest.mark.parametrize("seq,basis,limit", [
    (SequenceSpec.affine_decay([1, 2], [1, -1]), None, [1, 2]),
    (SequenceSpec.constant([3, 4]), None, [3, 4]),
    (SequenceSpec.affine_decay([0, 0], [1, 1]), [[1, 1], [1, -1]], [0, 0]),
])
def test_reconstruction(std2, seq, basis, limit):
    rep = coordinate_limit_reconstruction(std2, seq, basis)
    assert np.linalg.norm(np.subtract(rep.limit, limit)) <= 1e-6
    assert rep.verified


def test_reconstruction_rejects_non_cauchy(std2):
    with pytest.raises(ReconstructionError):
        coordinate_limit_reconstruction(std2, ALT_DECAY)


def test_closed_point_ball(std2):
    ball = Ball([0, 0], 1.0)
    rep = check_closed_point(std2, ball, [1, 0])
    assert rep.closure_point and rep.in_set and rep.convergence.verdict == "converges"
    out = check_closed_point(std2, ball, [2, 0])
    assert not out.closure_point and out.distance == pytest.approx(1.0)
    for row in out.mu_upper_bounds:
        assert row["mu_upper_bound"] == pytest.approx(row["t"] / (row["t"] + 1))
    fin = check_closed_point(std2, FiniteSet([[1, 2]]), [1, 2])
    assert fin.closure_point and fin.in_set


def test_compact_examples(std2):
    probes = [BALL_ALT, SequenceSpec.affine_decay([0, 0], [0.5, 0.5])]
    assert check_compact(std2, Ball([0, 0], 1.0), probes).compatible
    open_ball = Ball([0, 0], 1.0, closed=False)
    rep = check_compact(std2, open_ball, [SequenceSpec.affine_decay([1, 0], [-1, 0])])
    assert not rep.compatible and not rep.closed
    assert check_compact(std2, FiniteSet([[0, 0]]), [SequenceSpec.constant([0, 0])]).compatible


def test_probe_leaving_set(std2):
    with pytest.raises(ProbeError):
        check_compact(std2, Ball([0, 0], 1.0), [SequenceSpec.affine_decay([0, 0], [1, 1])])


def test_affine_image_membership(std2):
    img = AffineImage([[0, -1], [1, 0]], [1, 0], Ball([0, 0], 1.0))
    assert img.contains(std2, [1, 1]) and not img.contains(std2, [3, 0])
    with pytest.raises(UnsupportedError):
        AffineImage([[1, 0], [0, 0]], [0, 0], Ball([0, 0], 1.0))
