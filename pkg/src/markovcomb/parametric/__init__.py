"""Parametric models, their combinations and standard constructions."""

from .constructions import (
    binomial,
    consistent_saturated_pair,
    expfam_combination_dim,
    jacobian_rank,
    lift_preimage,
    model_lift,
    numeric_jacobian,
    piecewise_polynomial_model,
    polynomial_model,
    pure_mixture_coordinates,
    saturated,
    saturated_preimage,
    solve_consistency_exact,
)
from .model import (
    CONSISTENCY_TOL,
    SNAP_MAX_DENOMINATOR,
    TAU_NEG,
    TAU_NORM,
    CombinedModel,
    ConsistencyReport,
    ParamBox,
    ParametricModel,
    aggregate_gap,
    aggregate_model,
    coerce_theta,
    constant_model,
    evaluate,
    evaluate_with_error,
    is_meta_consistent,
    reparametrize,
    snap,
)
from .variants import (
    lower_combine,
    meta_star,
    mixture,
    mixture_via_chain,
    restricted_lower,
    restricted_super,
    restricted_upper,
    structured_marginals,
    structured_super,
    super_combine,
    two_point_model,
    upper_combine,
)

__all__ = [
    "CONSISTENCY_TOL",
    "CombinedModel",
    "ConsistencyReport",
    "ParamBox",
    "ParametricModel",
    "SNAP_MAX_DENOMINATOR",
    "TAU_NEG",
    "TAU_NORM",
    "aggregate_gap",
    "aggregate_model",
    "binomial",
    "coerce_theta",
    "consistent_saturated_pair",
    "constant_model",
    "evaluate",
    "evaluate_with_error",
    "expfam_combination_dim",
    "is_meta_consistent",
    "jacobian_rank",
    "lift_preimage",
    "lower_combine",
    "meta_star",
    "mixture",
    "mixture_via_chain",
    "model_lift",
    "numeric_jacobian",
    "piecewise_polynomial_model",
    "polynomial_model",
    "pure_mixture_coordinates",
    "reparametrize",
    "restricted_lower",
    "restricted_super",
    "restricted_upper",
    "saturated",
    "saturated_preimage",
    "snap",
    "solve_consistency_exact",
    "structured_marginals",
    "structured_super",
    "super_combine",
    "two_point_model",
    "upper_combine",
]
