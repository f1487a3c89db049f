"""Generalized intuitionistic fuzzy psi-normed spaces, checked numerically."""

__version__ = "0.1.0"

from .algebra import (CircleOp, FuzzyConnectives, PsiFunction, TConorm, TNorm,  # noqa: E402
                      apply_circle, apply_tconorm, apply_tnorm, check_connective_axioms,
                      find_companion_r3, find_companion_r4, find_idempotent_pair)
from .alpha import (AlphaNormFamily, alpha_norm, alpha_norms, check_ascending_family,  # noqa: E402
                    check_crisp_norm_axioms, closed_form_alpha_norm,
                    estimate_collinearity_constant)
from .compactness import (AffineImage, Ball, FiniteSet, check_closed_point,  # noqa: E402
                          check_compact, coordinate_limit_reconstruction, expand,
                          extract_convergent_subsequence)
from .continuity import (MapSpec, check_compact_image, check_ifc,  # noqa: E402
                         check_ifc_iff_sequential, check_sequentially_ifc,
                         check_strong_implies_sequential, check_strongly_ifc)
from .core import (GifPsiNorm, MembershipPair, VectorSpaceConfig,  # noqa: E402
                   check_extra_conditions, eval_membership, standard_construction,
                   validate_axioms)
from .errors import *  # noqa: E402,F401,F403
from .reports import AxiomEntry, AxiomReport, SamplerConfig  # noqa: E402
from .sequences import (SequenceSpec, check_bounded, check_cauchy,  # noqa: E402
                        check_convergence, check_convergent_implies_cauchy,
                        check_limit_arithmetic, check_limit_uniqueness)
