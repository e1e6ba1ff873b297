"""Exact Moebius-vs-polynomial-phase machinery over F_p[t] at desk scale.

The package computes, with exact arithmetic wherever a rational answer
exists: the Moebius function and its partial sums over strata of F_p[t];
biases of multilinear forms and the varieties they cut out; constructive
L2 approximations of biased phase functions by few lower-complexity
phases; and the staged correlation pipeline that chains these pieces
together, every inequality it relies on checked on concrete instances.

Modules: ffpoly (polynomials and Moebius), forms (multilinear machinery
and exact bias), varieties (multilinear varieties, density, fibers),
phaseapprox (phase approximation and Gowers inverse), pipeline (the
four-step correlation pipeline), serialize (JSON/CSV codecs), cli (the
command line driver), acceptance (numbered end-to-end checks).
"""

from .budget import (
    BudgetExceededError,
    HypothesisError,
    check_budget,
    enumeration_budget,
)
from .ffpoly import (
    BaseWDecomposition,
    PolyFp,
    SpaceIndex,
    base_w_decompose,
    count_irreducible_factors,
    enumerate_space,
    is_squarefree,
    mobius,
    poly_gcd,
    space_elements,
)
from .forms import (
    FiniteSpace,
    MultiaffineForm,
    MultilinearForm,
    PolynomialFn,
    RearrangementPreconditionError,
    derived_symmetric_form,
    rank_mod_p,
    rearrangement_dominates,
    rearrangement_sums,
    space_points,
    unit_phases,
)
from .varieties import (
    ConvolutionCheck,
    ExternalApproximation,
    FiberReport,
    FinderResult,
    MultilinearVariety,
    biased_fiber_variety,
    directional_convolution_positive,
    external_approximation,
    slice_bias_table,
    subvariety_finder,
    variety_density,
)
from .phaseapprox import (
    PhaseCombination,
    PhaseTerm,
    approximate_multilinear_phase,
    approximate_polynomial_phase,
    gowers_inverse_polynomial,
    gowers_norm,
    gowers_norm_exact,
    l2_distance,
)
from .pipeline import (
    CWReport,
    CascadeReport,
    CorrelationReport,
    DecayReport,
    DegreeLoweringResult,
    VaughanReport,
    bias_cascade_report,
    chevalley_warning_search,
    decay_experiment,
    degree_lowering,
    mobius_correlation,
    mobius_sum,
    random_phase_polynomial,
    sequence_plan,
    vaughan_dichotomy_check,
)
from .serialize import (
    SerializationError,
    combination_from_json,
    combination_to_json,
    dumps,
    form_from_json,
    form_to_json,
    loads,
    poly_from_json,
    poly_to_json,
    polynomial_fn_from_json,
    polynomial_fn_to_json,
    variety_from_json,
    variety_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "BaseWDecomposition",
    "BudgetExceededError",
    "CWReport",
    "CascadeReport",
    "ConvolutionCheck",
    "CorrelationReport",
    "DecayReport",
    "DegreeLoweringResult",
    "ExternalApproximation",
    "FiberReport",
    "FinderResult",
    "FiniteSpace",
    "HypothesisError",
    "MultiaffineForm",
    "MultilinearForm",
    "MultilinearVariety",
    "PhaseCombination",
    "PhaseTerm",
    "PolyFp",
    "PolynomialFn",
    "RearrangementPreconditionError",
    "SerializationError",
    "SpaceIndex",
    "VaughanReport",
    "approximate_multilinear_phase",
    "approximate_polynomial_phase",
    "base_w_decompose",
    "bias_cascade_report",
    "biased_fiber_variety",
    "check_budget",
    "chevalley_warning_search",
    "combination_from_json",
    "combination_to_json",
    "count_irreducible_factors",
    "decay_experiment",
    "degree_lowering",
    "derived_symmetric_form",
    "directional_convolution_positive",
    "dumps",
    "enumerate_space",
    "enumeration_budget",
    "external_approximation",
    "form_from_json",
    "form_to_json",
    "gowers_inverse_polynomial",
    "gowers_norm",
    "gowers_norm_exact",
    "is_squarefree",
    "l2_distance",
    "loads",
    "mobius",
    "mobius_correlation",
    "mobius_sum",
    "poly_from_json",
    "poly_gcd",
    "poly_to_json",
    "polynomial_fn_from_json",
    "polynomial_fn_to_json",
    "random_phase_polynomial",
    "rank_mod_p",
    "rearrangement_dominates",
    "rearrangement_sums",
    "sequence_plan",
    "slice_bias_table",
    "space_elements",
    "space_points",
    "subvariety_finder",
    "unit_phases",
    "variety_density",
    "variety_from_json",
    "variety_to_json",
    "vaughan_dichotomy_check",
]
