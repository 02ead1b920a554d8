"""Certified comparison of DPS weight policies.

For a stable instance with nonincreasing service rates, the aggregate
expected sojourn time is monotone in the weight vector in the following
sense: if alpha and beta both lie in the nonincreasing set, alpha's adjacent
weight ratios are pointwise below beta's (alpha discriminates at least as
strongly toward fast classes), and the instance satisfies the separation
condition

    mu_{j+1} / mu_j <= 1 - rho          for every adjacent pair j,

then T(alpha) <= T(beta). This module evaluates those hypotheses, produces a
:class:`MonotonicityReport`, and implements the supporting machinery that
makes the conclusion checkable rather than merely asserted: a transformed
rate vector mu_tilde and update matrix A_tilde, a column-sum contraction
bound, a y-vector obtainable both by a direct solve and by fixed-point
iteration, partial-column-sum orderings, and an expansion of the sojourn
difference that must agree with the directly solved difference.

The machinery is only valid when every class has arrival rate exactly 1.
Operations that need that form reject other inputs; use
:func:`split_classes` (rational rates p_i/q, one class per unit) followed by
:func:`normalize_arrivals` (common rate rescaled to 1 by a change of time
unit) to reduce a general instance.

Weights of classes whose rates are too close to satisfy separation can be
coalesced (set equal, propagating left to right); the comparison then
certifies the coalesced policies.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceError, NumericError
from .model import (
    ORDER_TOL,
    SystemParams,
    WeightVector,
    build_matrices,
    require_paired,
    sigma_matrix,
)
from .solver import solve_sojourn

# A certified comparison must come out ordered within this slack:
# T(alpha) <= T(beta) + CONCLUSION_TOL.
CONCLUSION_TOL = 1e-10

# Agreement required between the fixed-point and direct y-vectors.
Y_AGREEMENT_TOL = 1e-8

FIXED_POINT_TOL = 1e-10
FIXED_POINT_MAX_ITER_CAP = 1_000_000


class YMethod(enum.Enum):
    DIRECT = "direct"
    FIXED_POINT = "fixed_point"


@dataclass(frozen=True)
class YVector:
    """Row vector y with y (I - B) = mu, the weighing that orders the
    sojourn-difference expansion.

    ``residual`` is the infinity-norm defect of the equivalent fixed-point
    equation y = mu_tilde + y A_tilde and is kept below 1e-8 by both
    construction paths.
    """

    y: np.ndarray
    method: YMethod
    iterations: int
    residual: float

    def __post_init__(self) -> None:
        y = np.array(self.y, dtype=np.float64, copy=True).reshape(-1)
        if not np.all(np.isfinite(y)) or np.any(y <= 0.0):
            raise ValueError("y entries must be finite and strictly positive")
        y.flags.writeable = False
        object.__setattr__(self, "y", y)
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if not np.isfinite(self.residual) or self.residual < 0.0:
            raise ValueError("residual must be a nonnegative real")
        if self.residual > Y_AGREEMENT_TOL:
            raise ValueError(
                f"fixed-point residual {self.residual:.3e} exceeds the "
                f"{Y_AGREEMENT_TOL:.0e} bound the type guarantees"
            )


class SeparationViolation(NamedTuple):
    """An adjacent class pair whose rates are too close for certification."""

    pair_index: int  # 1-based index j of the pair (j, j+1)
    rate_ratio: float  # mu_{j+1} / mu_j
    stability_slack: float  # 1 - rho


@dataclass(frozen=True)
class ComparisonDiagnostics:
    """Verdicts of the supporting machinery, evaluated on the unit-arrival
    reduction with the stronger (alpha) policy."""

    contraction_factor: float
    mu_tilde_nonincreasing: bool
    partial_column_sums_ordered: bool
    y_nonincreasing: bool
    fixed_point_matches_direct: bool
    expansion_matches_direct: bool


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of comparing two weight policies on one instance.

    ``certified`` means every hypothesis of the monotonicity result holds,
    in which case ``difference = t_alpha - t_beta`` must not exceed 1e-10;
    a certified report with a larger positive difference indicates a bug in
    the library, not in the caller's data.
    """

    alpha_in_G: bool
    beta_in_G: bool
    ratio_condition_holds: bool
    separation_condition_holds: bool
    separation_violations: tuple[SeparationViolation, ...]
    certified: bool
    t_alpha: float
    t_beta: float
    difference: float
    diagnostics: ComparisonDiagnostics | None = None


def check_G(weights: WeightVector) -> bool:
    """True when the weights are nonincreasing (ties allowed)."""
    return weights.nonincreasing


def check_ratio_dominance(alpha: WeightVector, beta: WeightVector) -> bool:
    """True when alpha_{i+1}/alpha_i <= beta_{i+1}/beta_i for every i.

    Holding pointwise for adjacent pairs, the same ordering extends to all
    index gaps (ratios telescope); the extension is asserted as a debug
    cross-check whenever the adjacent test passes.
    """
    if len(alpha) != len(beta):
        raise ValueError(
            f"weight vectors must have equal length, got {len(alpha)} and {len(beta)}"
        )
    a, b = alpha.g, beta.g
    if a.size == 1:
        return True
    holds = bool(np.all(a[1:] / a[:-1] <= b[1:] / b[:-1] + ORDER_TOL))
    if holds:
        ratio_a = a[None, :] / a[:, None]
        ratio_b = b[None, :] / b[:, None]
        upper = np.triu_indices(a.size, k=1)
        assert np.all(
            ratio_a[upper] <= ratio_b[upper] + 1e-9
        ), "adjacent ratio dominance did not extend to all index gaps"
    return holds


def check_separation(
    params: SystemParams,
) -> tuple[bool, tuple[SeparationViolation, ...]]:
    """Evaluate mu_{j+1}/mu_j <= 1 - rho for every adjacent class pair.

    Returns the overall verdict and one record per violating pair. A single
    class has no adjacent pairs and trivially satisfies the condition.
    """
    slack = 1.0 - params.load
    ratios = params.mu[1:] / params.mu[:-1]
    violations = tuple(
        SeparationViolation(pair_index=j + 1, rate_ratio=float(r), stability_slack=slack)
        for j, r in enumerate(ratios)
        if r > slack + ORDER_TOL
    )
    return (len(violations) == 0), violations


def coalesce_weights(params: SystemParams, weights: WeightVector) -> WeightVector:
    """Equalize weights across every adjacent pair that violates separation.

    The later weight of each violating pair is overwritten with the earlier
    one, sweeping left to right so a chain of violations collapses onto one
    shared weight. The input must be nonincreasing; the output stays
    nonincreasing and the operation is idempotent.
    """
    require_paired(params, weights)
    if not weights.nonincreasing:
        raise ValueError("weights must be nonincreasing before coalescing")
    _, violations = check_separation(params)
    g = np.array(weights.g, copy=True)
    for violation in violations:
        j = violation.pair_index - 1
        g[j + 1] = g[j]
    return WeightVector(g)


def _require_unit_arrivals(params: SystemParams, op_name: str) -> None:
    if not params.unit_arrivals:
        raise ValueError(
            f"{op_name} requires every arrival rate to equal 1; reduce the "
            "instance first with split_classes and/or normalize_arrivals"
        )


def _weighted_rate_products(params: SystemParams, weights: WeightVector) -> np.ndarray:
    return params.mu * weights.g


def _f_occupancy(x: np.ndarray, params: SystemParams, weights: WeightVector) -> np.ndarray:
    """f(x) = sum_k x / (mu_k (x + mu_k g_k)), vectorized over x."""
    prod = _weighted_rate_products(params, weights)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    return np.sum(x[:, None] / (params.mu[None, :] * (x[:, None] + prod[None, :])), axis=1)


def mu_tilde(params: SystemParams, weights: WeightVector) -> np.ndarray:
    """Transformed rate vector mu_i / (1 - f2(mu_i g_i)) with
    f2(x) = sum_k g_k / (x + mu_k g_k); requires unit arrivals.

    Equals the matrix form mu^T (I - D)^{-1}. Under separation and
    nonincreasing weights the result is nonincreasing in the class index.
    """
    require_paired(params, weights)
    _require_unit_arrivals(params, "mu_tilde")
    prod = _weighted_rate_products(params, weights)
    f2 = np.sum(weights.g[None, :] / (prod[:, None] + prod[None, :]), axis=1)
    denom = 1.0 - f2
    if np.any(denom <= 0.0):
        raise NumericError(
            f"transformed rates degenerate (1 - f2 <= 0) for {params.describe()}"
        )
    return params.mu / denom


def a_tilde(params: SystemParams, weights: WeightVector) -> np.ndarray:
    """Transformed update matrix with entries

        A_tilde[i, j] = mu_j g_j / (mu_i (mu_i g_i + mu_j g_j)
                                    * (1 - rho + f(mu_j g_j)));

    requires unit arrivals. Equals M^{-1} A M (I - D)^{-1} with
    M = diag(mu). Every column sum is f(mu_j g_j)/(1 - rho + f(mu_j g_j)),
    strictly below 1, which is what makes the fixed-point iteration on the
    y-vector converge for every stable instance.
    """
    require_paired(params, weights)
    _require_unit_arrivals(params, "a_tilde")
    prod = _weighted_rate_products(params, weights)
    slack = 1.0 - params.load
    col_scale = slack + _f_occupancy(prod, params, weights)
    return prod[None, :] / (
        params.mu[:, None] * (prod[:, None] + prod[None, :]) * col_scale[None, :]
    )


def contraction_factor(params: SystemParams, weights: WeightVector) -> float:
    """One-norm contraction bound q in (0, 1) for the update matrix.

    q = 1 - (1 - rho) / (1 - rho + max_j f(mu_j g_j)); for every
    entrywise-nonnegative vector x, sum(A_tilde @ x) <= q * sum(x).
    """
    require_paired(params, weights)
    _require_unit_arrivals(params, "contraction_factor")
    prod = _weighted_rate_products(params, weights)
    slack = 1.0 - params.load
    f_max = float(np.max(_f_occupancy(prod, params, weights)))
    return 1.0 - slack / (slack + f_max)


def y_direct(params: SystemParams, weights: WeightVector) -> YVector:
    """Solve the row system y (I - B) = mu directly.

    Implemented as the transposed column solve (I - B)^T z = 1 followed by
    y_i = z_i mu_i. The residual field reports the defect against the
    equivalent fixed-point equation y = mu_tilde + y A_tilde.
    """
    require_paired(params, weights)
    _require_unit_arrivals(params, "y_direct")
    mats = build_matrices(params, weights)
    m = params.class_count
    try:
        z = np.linalg.solve((np.eye(m) - mats.B).T, np.ones(m))
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"y-vector system is singular for {params.describe()}") from exc
    y = z * params.mu
    residual = float(np.max(np.abs(y - (mu_tilde(params, weights) + y @ a_tilde(params, weights)))))
    return YVector(y=y, method=YMethod.DIRECT, iterations=0, residual=residual)


def y_fixed_point(
    params: SystemParams,
    weights: WeightVector,
    tol: float = FIXED_POINT_TOL,
    max_iter: int | None = None,
) -> YVector:
    """Obtain the y-vector by iterating y <- mu_tilde + y A_tilde from zero.

    The iteration contracts in the infinity norm with the factor reported by
    :func:`contraction_factor`, so the iterate count obeys the usual
    geometric bound. Iteration continues until the step size drops below
    min(tol, 1e-8); the 1e-8 floor guarantees the returned vector satisfies
    the :class:`YVector` residual invariant regardless of the caller's tol.
    """
    require_paired(params, weights)
    _require_unit_arrivals(params, "y_fixed_point")
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    q = contraction_factor(params, weights)
    if max_iter is None:
        max_iter = min(
            FIXED_POINT_MAX_ITER_CAP, 10 * math.ceil(math.log(1e-12) / math.log(q))
        )
    if max_iter < 1:
        raise ValueError(f"max_iter must be positive, got {max_iter}")

    mu_t = mu_tilde(params, weights)
    update = a_tilde(params, weights)
    stop = min(tol, Y_AGREEMENT_TOL)
    y = np.zeros(params.class_count)
    step = np.inf
    for iteration in range(1, max_iter + 1):
        y_next = mu_t + y @ update
        step = float(np.max(np.abs(y_next - y)))
        y = y_next
        if step <= stop:
            # One more application of the map measures the true residual.
            residual = float(np.max(np.abs(mu_t + y @ update - y)))
            return YVector(
                y=y, method=YMethod.FIXED_POINT, iterations=iteration, residual=residual
            )
    # the step size equals the previous iterate's fixed-point residual
    raise ConvergenceError(
        f"y fixed point did not reach {stop:.1e} within {max_iter} iterations "
        f"(contraction factor q = {q:.6f}, last residual {step:.3e})"
    )


def check_partial_column_sums(params: SystemParams, weights: WeightVector) -> bool:
    """True when every partial column sum of the update matrix is
    nonincreasing in the column index.

    For each r, sum_{i<=r} A_tilde[i, j] must not increase with j. Holds
    whenever mu_j g_j is nonincreasing, in particular for nonincreasing
    weights (which this operation requires) on rate-sorted instances.
    """
    require_paired(params, weights)
    if not weights.nonincreasing:
        raise ValueError("partial column sum check requires nonincreasing weights")
    partial = np.cumsum(a_tilde(params, weights), axis=0)
    return bool(np.all(np.diff(partial, axis=1) <= ORDER_TOL))


def sojourn_difference_expansion(
    params: SystemParams, alpha: WeightVector, beta: WeightVector
) -> float:
    """Aggregate sojourn difference T(alpha) - T(beta) via its expansion.

        (1/lambda) * sum_{i,j} (sigma_ij(alpha) - sigma_ij(beta))
                               * (y_i - y_j) / mu_i * T_j(beta)

    with y the direct y-vector of the alpha system. This is the module's
    central self-consistency oracle: it must match the difference of the two
    directly solved aggregates to 1e-9 relative.
    """
    require_paired(params, alpha)
    require_paired(params, beta)
    _require_unit_arrivals(params, "sojourn_difference_expansion")
    sig_alpha = sigma_matrix(params, alpha)
    sig_beta = sigma_matrix(params, beta)
    y = y_direct(params, alpha).y
    t_beta = solve_sojourn(params, beta).per_class
    terms = (
        (sig_alpha - sig_beta)
        * (y[:, None] - y[None, :])
        / params.mu[:, None]
        * t_beta[None, :]
    )
    return float(np.sum(terms) / params.total_arrival_rate)


def split_classes(
    params: SystemParams,
    weights: WeightVector,
    q: int,
    p: Sequence[int],
) -> tuple[SystemParams, WeightVector]:
    """Split rational arrival rates lambda_i = p_i / q into p_i unit-share
    classes of rate 1/q each, replicating service rates and weights.

    The expanded instance is observationally identical: its aggregate
    sojourn time equals the original's, and each clone inherits the per-class
    sojourn time of its source class.
    """
    require_paired(params, weights)
    if q < 1:
        raise ValueError(f"q must be a positive integer, got {q}")
    counts = [int(c) for c in p]
    if len(counts) != params.class_count:
        raise ValueError(
            f"p must list one multiplicity per class, got {len(counts)} "
            f"for {params.class_count} classes"
        )
    if any(c < 1 for c in counts):
        raise ValueError(f"class multiplicities must be positive, got {counts}")
    for i, (lam_i, p_i) in enumerate(zip(params.lam, counts), start=1):
        target = p_i / q
        if abs(lam_i - target) > 1e-12 * max(1.0, abs(lam_i)):
            raise ValueError(
                f"lambda_{i} = {lam_i!r} does not equal p_{i}/q = {Fraction(p_i, q)}"
            )
    lam = np.full(sum(counts), 1.0 / q)
    mu = np.repeat(params.mu, counts)
    g = np.repeat(weights.g, counts)
    return SystemParams(lam=lam, mu=mu), WeightVector(g)


def normalize_arrivals(
    params: SystemParams, weights: WeightVector
) -> tuple[SystemParams, WeightVector]:
    """Rescale the time unit so a common arrival rate becomes exactly 1.

    Requires all arrival rates equal to some common value c. Returns the
    instance with lambda* = 1 and mu* = mu / c; weights are untouched. The
    load is unchanged and every per-class sojourn time scales as
    T*_k = c * T_k (pure change of time unit).
    """
    require_paired(params, weights)
    common = float(params.lam[0])
    if np.any(np.abs(params.lam - common) > 1e-12 * max(1.0, common)):
        raise ValueError(
            "arrival rates are not all equal; apply split_classes first to "
            "reach a common rate"
        )
    return SystemParams(lam=np.ones(params.class_count), mu=params.mu / common), weights


def _unit_reduction(
    params: SystemParams, *weight_vectors: WeightVector
) -> tuple[SystemParams, tuple[WeightVector, ...]] | None:
    """Best-effort exact reduction of an instance to unit arrival rates.

    Returns None when the rates admit no small exact rational structure
    (the expansion would explode or the floats are not near any short
    fraction); callers then skip the unit-arrival machinery.
    """
    if params.unit_arrivals:
        return params, weight_vectors
    if np.all(np.abs(params.lam - params.lam[0]) <= 1e-12 * max(1.0, params.lam[0])):
        reduced, _ = normalize_arrivals(params, weight_vectors[0])
        return reduced, weight_vectors

    fractions: list[Fraction] = []
    for lam_i in params.lam:
        frac = Fraction(float(lam_i)).limit_denominator(10**6)
        if abs(float(frac) - lam_i) > 1e-12 * max(1.0, abs(lam_i)):
            return None
        fractions.append(frac)
    q = math.lcm(*(frac.denominator for frac in fractions))
    counts = [int(frac * q) for frac in fractions]
    if any(c < 1 for c in counts) or sum(counts) > 128:
        return None
    reduced_params = None
    reduced_weights = []
    for g in weight_vectors:
        split_params, split_g = split_classes(params, g, q, counts)
        unit_params, unit_g = normalize_arrivals(split_params, split_g)
        reduced_params = unit_params
        reduced_weights.append(unit_g)
    assert reduced_params is not None
    return reduced_params, tuple(reduced_weights)


def _diagnostics(
    params: SystemParams, alpha: WeightVector, beta: WeightVector
) -> ComparisonDiagnostics:
    """Run the supporting machinery on a unit-arrival instance."""
    q = contraction_factor(params, alpha)
    mu_t = mu_tilde(params, alpha)
    direct = y_direct(params, alpha)
    fixed = y_fixed_point(params, alpha)
    eps = ORDER_TOL * max(1.0, float(np.max(np.abs(direct.y))))

    direct_difference = (
        solve_sojourn(params, alpha).aggregate - solve_sojourn(params, beta).aggregate
    )
    expansion = sojourn_difference_expansion(params, alpha, beta)
    expansion_ok = abs(expansion - direct_difference) <= 1e-9 * max(
        1.0, abs(direct_difference)
    )
    return ComparisonDiagnostics(
        contraction_factor=q,
        mu_tilde_nonincreasing=bool(np.all(np.diff(mu_t) <= ORDER_TOL * max(1.0, mu_t[0]))),
        partial_column_sums_ordered=check_partial_column_sums(params, alpha),
        y_nonincreasing=bool(np.all(np.diff(direct.y) <= eps)),
        fixed_point_matches_direct=bool(
            np.max(np.abs(fixed.y - direct.y)) <= Y_AGREEMENT_TOL
        ),
        expansion_matches_direct=expansion_ok,
    )


def compare_policies(
    params: SystemParams, alpha: WeightVector, beta: WeightVector
) -> MonotonicityReport:
    """Compare two weight policies and certify the sojourn-time ordering.

    The aggregate sojourn times are always solved on the original instance.
    Certification requires both vectors nonincreasing, alpha ratio-dominated
    by beta, and the separation condition on the instance. When the instance
    reduces exactly to unit arrival rates, the supporting machinery is also
    evaluated (with alpha, whose y-vector drives the difference expansion)
    and attached as diagnostics.
    """
    require_paired(params, alpha)
    require_paired(params, beta)
    alpha_in_g = check_G(alpha)
    beta_in_g = check_G(beta)
    ratio_holds = check_ratio_dominance(alpha, beta)
    separation_holds, violations = check_separation(params)
    t_alpha = solve_sojourn(params, alpha).aggregate
    t_beta = solve_sojourn(params, beta).aggregate

    diagnostics = None
    if alpha_in_g and beta_in_g:
        reduction = _unit_reduction(params, alpha, beta)
        if reduction is not None:
            unit_params, (unit_alpha, unit_beta) = reduction
            diagnostics = _diagnostics(unit_params, unit_alpha, unit_beta)

    return MonotonicityReport(
        alpha_in_G=alpha_in_g,
        beta_in_G=beta_in_g,
        ratio_condition_holds=ratio_holds,
        separation_condition_holds=separation_holds,
        separation_violations=violations,
        certified=alpha_in_g and beta_in_g and ratio_holds and separation_holds,
        t_alpha=t_alpha,
        t_beta=t_beta,
        difference=t_alpha - t_beta,
        diagnostics=diagnostics,
    )
