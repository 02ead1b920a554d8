"""Analysis toolkit for discriminatory processor sharing (DPS) queues.

Exact per-class sojourn times for M-class DPS queues with exponential
service, processor-sharing and priority (c-mu rule) baselines, certified
monotone comparison of weight policies with its full supporting machinery,
and a matching discrete-event simulator.
"""

from .errors import (
    ConvergenceError,
    DpsqError,
    InstanceFormatError,
    NumericError,
    StabilityError,
)
from .model import (
    RateMatrices,
    SojournSolution,
    SystemParams,
    WeightVector,
    build_matrices,
    sigma,
    sigma_matrix,
)
from .monotonicity import (
    ComparisonDiagnostics,
    MonotonicityReport,
    SeparationViolation,
    YMethod,
    YVector,
    a_tilde,
    check_G,
    check_partial_column_sums,
    check_ratio_dominance,
    check_separation,
    coalesce_weights,
    compare_policies,
    contraction_factor,
    mu_tilde,
    normalize_arrivals,
    sojourn_difference_expansion,
    split_classes,
    y_direct,
    y_fixed_point,
)
from .presets import near_equal_instance, well_separated_instance
from .sim import SimConfig, SimEstimate, simulate
from .solver import (
    SweepRow,
    cmu_sojourn,
    default_sweep_grid,
    ps_sojourn,
    solve_sojourn,
    sweep,
    weight_family,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonDiagnostics",
    "ConvergenceError",
    "DpsqError",
    "InstanceFormatError",
    "MonotonicityReport",
    "NumericError",
    "RateMatrices",
    "SeparationViolation",
    "SimConfig",
    "SimEstimate",
    "SojournSolution",
    "StabilityError",
    "SweepRow",
    "SystemParams",
    "WeightVector",
    "YMethod",
    "YVector",
    "a_tilde",
    "build_matrices",
    "check_G",
    "check_partial_column_sums",
    "check_ratio_dominance",
    "check_separation",
    "cmu_sojourn",
    "coalesce_weights",
    "compare_policies",
    "contraction_factor",
    "default_sweep_grid",
    "mu_tilde",
    "near_equal_instance",
    "normalize_arrivals",
    "ps_sojourn",
    "sigma",
    "sigma_matrix",
    "simulate",
    "sojourn_difference_expansion",
    "solve_sojourn",
    "split_classes",
    "sweep",
    "weight_family",
    "well_separated_instance",
    "y_direct",
    "y_fixed_point",
]
