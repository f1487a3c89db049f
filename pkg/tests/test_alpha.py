import numpy as np
import pytest

from gifpsi import (AlphaNormFamily, CircleOp, FuzzyConnectives, GifPsiNorm, PsiFunction, SamplerConfig,
                    VectorSpaceConfig, alpha_norm, check_ascending_family,
                    check_crisp_norm_axioms, estimate_collinearity_constant,
                    standard_construction)
from gifpsi.errors import DomainError, RankError, UnreachableLevelError


@pytest.fixture
def fam(std2):
    return AlphaNormFamily(std2)


def test_examples(fam):
    assert alpha_norm(fam, [3, 4], 0.5) == pytest.approx(5.0, abs=1e-8)
    assert alpha_norm(fam, [3, 4], 0.8) == pytest.approx(20.0, abs=1e-8)
    assert alpha_norm(fam, [0, 0], 0.3) == 0.0


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_alpha_domain(fam, alpha):
    with pytest.raises(DomainError, match="open"):
        alpha_norm(fam, [1, 0], alpha)


def test_unreachable_level():
    space = VectorSpaceConfig(2)
    capped = GifPsiNorm(space, kind="custom", mu_fn=lambda x, t: 0.4 if x.any() else 1.0,
                        nu_fn=lambda x, t: 0.6 if x.any() else 0.0)
    with pytest.raises(UnreachableLevelError):
        alpha_norm(AlphaNormFamily(capped), [1, 0], 0.5)


def test_ascending_examples(std2):
    for variant in ("mu", "nu"):
        rep = check_ascending_family(AlphaNormFamily(std2, variant), [3, 4], [0.1, 0.5, 0.9])
        np.testing.assert_allclose(rep.values, [5 / 9, 5, 45], rtol=1e-9)
        assert rep.nondecreasing
    zero = check_ascending_family(AlphaNormFamily(std2), [0, 0], [0.2, 0.4])
    assert zero.values == [0.0, 0.0]


def test_crisp_axioms_pass(fam):
    rep = check_crisp_norm_axioms(fam, 0.5, SamplerConfig(samples=1000))
    assert rep.passed
    assert rep.entry("psi-homogeneity").evidence["max_relative_error"] <= 1e-9


def test_crisp_triangle_is_tested_not_assumed():
    # squared crisp norm: psi-homogeneous for psi = |a|^2, but its level sets are not subadditive
    space = VectorSpaceConfig(2)
    conn = FuzzyConnectives(circle=CircleOp("max"), psi=PsiFunction("abs-power", p=2.0))
    n = GifPsiNorm(space, conn, kind="custom",
                   mu_fn=lambda x, t: t / (t + space.norm(x) ** 2),
                   nu_fn=lambda x, t: space.norm(x) ** 2 / (t + space.norm(x) ** 2))
    rep = check_crisp_norm_axioms(AlphaNormFamily(n), 0.5, SamplerConfig(samples=200))
    assert rep.entry("psi-homogeneity").status == "pass"
    tri = rep.entry("triangle")
    assert tri.failed and tri.lhs > tri.rhs


def test_collinearity_examples(fam):
    s = SamplerConfig(samples=10000)
    est = estimate_collinearity_constant(fam, [[1, 0], [0, 1]], 0.5, s)
    assert est.c_alpha_estimate == pytest.approx(1 / np.sqrt(2), abs=1e-3)
    assert estimate_collinearity_constant(fam, [[3, 4]], 0.5, s).c_alpha_estimate == pytest.approx(5.0)
    near = estimate_collinearity_constant(fam, [[1, 0], [1, 1e-3]], 0.5, s)
    assert near.c_alpha_estimate == pytest.approx(5e-4, rel=0.05)
    with pytest.raises(RankError):
        estimate_collinearity_constant(fam, [[1, 0], [2, 0]], 0.5, s)


def test_collinearity_never_exceeds_one_hot(fam):
    V = [[2.0, 1.0], [-1.0, 3.0]]
    est = estimate_collinearity_constant(fam, V, 0.3, SamplerConfig(samples=500))
    assert est.c_alpha_estimate <= min(alpha_norm(fam, v, 0.3) for v in V)


def test_k_scaling():
    n = standard_construction(VectorSpaceConfig(2), k=3.0)
    assert alpha_norm(AlphaNormFamily(n), [3, 4], 0.25) == pytest.approx(0.25 * 3 * 5 / 0.75)
