"""Exact discrete orthogonal polynomials in several variables.

The package constructs, in exact rational arithmetic, every family of
discrete orthogonal polynomials that arises as the eigenfunctions of an
admissible second-order difference operator on a standard lattice set
(full grid, simplex, box, or capped simplex), together with the operators
themselves, their weights, closed-form norms, and a verification engine
for orthogonality, eigen identities, norms, ranks, compatibility, and
limit transitions.
"""

from .rationals import (
    GaussRat,
    Scalar,
    as_fraction,
    demote,
    falling,
    fmt_scalar,
    is_real_scalar,
    parse_scalar,
    pochhammer,
    stirling2,
)
from .multipoly import (
    Poly,
    delta,
    falling_decomp,
    falling_poly,
    hyper_poly,
    nabla,
    neg_falling,
    shift_poly,
)
from .lattice import (
    Box,
    FullGrid,
    LatticeBase,
    Simplex,
    TruncatedSimplex,
)
from .operators import (
    AdmissibleFit,
    CheckReport,
    DiffForm,
    ShiftForm,
    Violation,
    check_compatibility,
    check_self_adjoint,
    fit_admissible_form,
    operator_from_obj,
    to_diff_form,
    to_shift_form,
)
from .classify import (
    CaseResolution,
    ClassifyError,
    LinearBlock,
    WeightTable,
    WeightlessOperatorError,
    linear_operator,
    quadratic_operator,
    resolve_quadratic_case,
    split_linear_blocks,
    weight_from_operator,
)
from .families import (
    ALL_KINDS,
    FINITE_KINDS,
    FamilyError,
    FamilySpec,
    KINDS_1D,
    KINDS_MULTI,
    LIMIT_RELATIONS,
    LINEAR_KINDS,
    OrthoSystem,
    ProductSystem,
    build_system,
    limit_relation,
    limit_target,
    moment_pair,
    norm_ratio,
    poly_1d,
    poly_multi,
    product_system,
    product_type_enumeration,
    r_recurrence_coeffs,
    reduce_box_monomials,
    weight_closed,
)
from .verify import (
    GramReport,
    VerifyError,
    VerifyReport,
    adjoint_symmetry_check,
    eigencheck,
    gram,
    limitcheck,
    normcheck,
    rankcheck,
    three_term_check,
)

__version__ = "0.1.0"

__all__ = [
    "GaussRat",
    "Scalar",
    "as_fraction",
    "demote",
    "falling",
    "fmt_scalar",
    "is_real_scalar",
    "parse_scalar",
    "pochhammer",
    "stirling2",
    "Poly",
    "delta",
    "falling_decomp",
    "falling_poly",
    "hyper_poly",
    "nabla",
    "neg_falling",
    "shift_poly",
    "Box",
    "FullGrid",
    "LatticeBase",
    "Simplex",
    "TruncatedSimplex",
    "AdmissibleFit",
    "CheckReport",
    "DiffForm",
    "ShiftForm",
    "Violation",
    "check_compatibility",
    "check_self_adjoint",
    "fit_admissible_form",
    "operator_from_obj",
    "to_diff_form",
    "to_shift_form",
    "CaseResolution",
    "ClassifyError",
    "LinearBlock",
    "WeightTable",
    "WeightlessOperatorError",
    "linear_operator",
    "quadratic_operator",
    "resolve_quadratic_case",
    "split_linear_blocks",
    "weight_from_operator",
    "ALL_KINDS",
    "FINITE_KINDS",
    "FamilyError",
    "FamilySpec",
    "KINDS_1D",
    "KINDS_MULTI",
    "LIMIT_RELATIONS",
    "LINEAR_KINDS",
    "OrthoSystem",
    "ProductSystem",
    "build_system",
    "limit_relation",
    "limit_target",
    "moment_pair",
    "norm_ratio",
    "poly_1d",
    "poly_multi",
    "product_system",
    "product_type_enumeration",
    "r_recurrence_coeffs",
    "reduce_box_monomials",
    "weight_closed",
    "GramReport",
    "VerifyError",
    "VerifyReport",
    "adjoint_symmetry_check",
    "eigencheck",
    "gram",
    "limitcheck",
    "normcheck",
    "rankcheck",
    "three_term_check",
    "__version__",
]
