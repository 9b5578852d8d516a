"""Numerical certification toolkit for cone-ordered convexity defects.

The package checks, falsifies, and reports on approximate convexity
inequalities for vector-valued mappings ordered by a polyhedral cone, and
estimates one-sided directional derivatives with honest error brackets.
"""

from .geometry import (
    Box,
    ConeBase,
    DualFunctional,
    PolyCone,
    as_point,
    base_of,
    cone_from_generators,
    cone_from_inequalities,
    contains,
    dual_cone,
    leq,
    norm,
    normality_constant,
    orthant,
    random_simplicial_cone,
    relative_interior_contains,
    strictly_positive_functional,
)
from .modulus import (
    Modulus,
    ParaSpec,
    convert_constants,
    eval_modulus,
    power_modulus,
    square_modulus,
    table_modulus,
    verify_modulus,
    zero_modulus,
)
from .mappings import (
    Example1Config,
    OutsideDomainError,
    PiecewiseLinear,
    Quadratic1D,
    Sine1D,
    VectorMapping,
    abs_1d,
    affine_mapping,
    curved_cone_map,
    example1_default,
    known_directional,
    make_example1,
    make_semiconvex_scalar,
    neg_abs_1d,
    neg_square_1d,
    smooth_r2_r3,
    testbed_families,
)
from .checks import (
    SampleTriple,
    check_approx_convex,
    check_fact2,
    check_inequality,
    check_local_vector_bounded,
    check_vector_lipschitz,
    dyadic_small_gap_triples,
    falsify,
    sample_triples,
    scalarize_check,
)
from .derivative import (
    ConvergenceError,
    DerivativeEstimate,
    FrechetReport,
    GateauxReport,
    QuotientTrace,
    ScanReport,
    build_trace,
    check_alpha_monotone,
    check_lower_bound,
    check_sublinear,
    check_upper_bound,
    directional_derivative,
    frechet_test,
    gateaux_scan,
    gateaux_test,
)
from .reports import CheckReport

__version__ = "0.1.0"

__all__ = [
    "Box",
    "CheckReport",
    "ConeBase",
    "ConvergenceError",
    "DerivativeEstimate",
    "DualFunctional",
    "Example1Config",
    "FrechetReport",
    "GateauxReport",
    "Modulus",
    "OutsideDomainError",
    "ParaSpec",
    "PiecewiseLinear",
    "PolyCone",
    "Quadratic1D",
    "QuotientTrace",
    "SampleTriple",
    "ScanReport",
    "Sine1D",
    "VectorMapping",
    "abs_1d",
    "affine_mapping",
    "as_point",
    "base_of",
    "build_trace",
    "check_alpha_monotone",
    "check_approx_convex",
    "check_fact2",
    "check_inequality",
    "check_local_vector_bounded",
    "check_lower_bound",
    "check_sublinear",
    "check_upper_bound",
    "check_vector_lipschitz",
    "cone_from_generators",
    "cone_from_inequalities",
    "contains",
    "convert_constants",
    "curved_cone_map",
    "directional_derivative",
    "dual_cone",
    "dyadic_small_gap_triples",
    "eval_modulus",
    "example1_default",
    "falsify",
    "frechet_test",
    "gateaux_scan",
    "gateaux_test",
    "known_directional",
    "leq",
    "make_example1",
    "make_semiconvex_scalar",
    "neg_abs_1d",
    "neg_square_1d",
    "norm",
    "normality_constant",
    "orthant",
    "power_modulus",
    "random_simplicial_cone",
    "relative_interior_contains",
    "sample_triples",
    "scalarize_check",
    "smooth_r2_r3",
    "square_modulus",
    "strictly_positive_functional",
    "table_modulus",
    "testbed_families",
    "verify_modulus",
    "zero_modulus",
    "__version__",
]
