import numpy as np
from hypothesis import given, settings, strategies as st

from gifpsi import (AlphaNormFamily, SequenceSpec, TConorm, TNorm, VectorSpaceConfig, alpha_norm,
                    check_convergence, closed_form_alpha_norm, eval_membership,
                    standard_construction)

unit = st.floats(0.0, 1.0)
STD = standard_construction(VectorSpaceConfig(2), k=1.5)
vec = st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=2)


@given(st.sampled_from(TNorm._builtins), unit, unit)
def test_tnorm_bounded_by_min(kind, a, b):
    v = TNorm(kind)(a, b)
    assert 0.0 <= v <= min(a, b) + 1e-15
    assert v == TNorm(kind)(b, a)


@given(st.sampled_from(TConorm._builtins), unit, unit)
def test_tconorm_bounded_by_max(kind, a, b):
    v = TConorm(kind)(a, b)
    assert max(a, b) - 1e-15 <= v <= 1.0


@given(vec, st.floats(1e-6, 1e6))
def test_memberships_sum_to_one_and_symmetric(x, t):
    p = eval_membership(STD, x, t)
    q = eval_membership(STD, [-c for c in x], t)
    assert abs(p.mu + p.nu - 1.0) < 1e-12
    assert (p.mu, p.nu) == (q.mu, q.nu)


@settings(max_examples=60, deadline=None)
@given(vec, st.floats(0.01, 0.99))
def test_alpha_norm_matches_closed_form(x, alpha):
    got = alpha_norm(AlphaNormFamily(STD), x, alpha)
    want = closed_form_alpha_norm(STD.k, float(np.linalg.norm(x)), alpha)
    assert abs(got - want) <= 1e-6 * max(1.0, want)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 10.0))
def test_n0_nonincreasing_in_r(scale):
    s = SequenceSpec.affine_decay([0, 0], [scale, 0])
    rep = check_convergence(STD, s, [0, 0], r_grid=(0.1, 0.3, 0.6), t_grid=(1.0,), N=500)
    n0s = [rep.n0(r, 1.0) for r in (0.1, 0.3, 0.6)]
    assert all(a is not None for a in n0s)
    assert n0s[0] >= n0s[1] >= n0s[2]
    # mu > 1 - r with mu = n/(n + k*scale): first n above k*scale*(1-r)/r
    for r, n0 in zip((0.1, 0.3, 0.6), n0s):
        assert n0 == int(np.floor(STD.k * scale * (1 - r) / r)) + 1
