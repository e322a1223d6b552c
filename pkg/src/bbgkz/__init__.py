"""Exact-arithmetic tools for better behaved hypergeometric systems.

The public surface mirrors the pipeline: group and degree data (`abelian`),
cone layers and volumes (`polyhedral`), graded quotient dimensions (`ring`),
truncated solution germs (`solver`), character lifting (`torsion`), and the
batch runner (`cli`).
"""

from .abelian import (AbelianGroup, Character, DualElement, GroupElement,
                      NoDegreeFunctional, NotSpanning, char_value, pair,
                      smith_normal_form, validate_data)
from .linalg import GaussianRational
from .polyhedral import (Cone, DegeneratePolytope, GradedSemigroup,
                         KPrimGuardError, NotPointed, build_semigroup,
                         enumerate_layer, k_prim, normalized_volume,
                         triangulate_polytope)
from .ring import (DimReport, FVector, NondegeneracyCertificate,
                   NondegeneracyRetriesExhausted, dual_kernel_dims,
                   hat_quotient_dims, hat_restriction_rank, is_nondegenerate,
                   jacobian_dims, log_derivative_matrices, r1_dims,
                   random_rational_x)
from .solver import (InconsistentSystem, LambdaTable, ResidualReport,
                     SolutionBasis, check_residuals, evaluate_series,
                     filtration_dims, restricted_solution_rank,
                     solve_recursion)
from .torsion import (LogModulusBox, QuotientProblem, RegionTooTight,
                      ResidualTooLarge, build_quotient, find_common_basepoint,
                      independence_count, lift_and_verify, p_rho)

__version__ = "1.0.0"
