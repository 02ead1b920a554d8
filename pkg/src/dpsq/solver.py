"""Expected sojourn times for DPS queues, with reference baselines.

The central operation solves the linear system

    (I - D - A) T = [1/mu_1, ..., 1/mu_M]^T

for the per-class expected sojourn times T_k, where A and D come from
:func:`dpsq.model.build_matrices`. Two closed-form baselines accompany it:
egalitarian processor sharing (the equal-weight special case) and the
preemptive-resume priority queue ordered by service rate, which is the
optimal nonanticipating policy for exponential service (the c-mu rule with
unit holding costs) and the limit of ever more skewed DPS weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import NumericError
from .model import (
    SojournSolution,
    SystemParams,
    WeightVector,
    build_matrices,
    require_paired,
)

# A one-norm condition number above this means the solve cannot be trusted.
CONDITION_LIMIT = 1e12

# Residual gate applied to every solve, relative to the right-hand side.
RESIDUAL_RTOL = 1e-10


def solve_sojourn(params: SystemParams, weights: WeightVector) -> SojournSolution:
    """Per-class expected sojourn times under the given weight vector.

    Uses a dense LU solve with partial pivoting (the class count is small,
    sparse machinery would be overhead). Raises :class:`NumericError` if the
    system is ill-conditioned (one-norm condition estimate above 1e12) or if
    the solution fails the residual or minimum-service-time sanity gates.
    """
    require_paired(params, weights)
    mats = build_matrices(params, weights)
    m = params.class_count
    kernel = np.eye(m) - mats.D - mats.A
    rhs = 1.0 / params.mu

    try:
        cond = np.linalg.cond(kernel, 1)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NumericError(
            f"sojourn system is ill-conditioned (cond_1 = {cond:.3e}) for "
            f"{params.describe()}, g={np.array2string(weights.g, precision=6)}"
        )

    per_class = np.linalg.solve(kernel, rhs)

    residual = np.max(np.abs(kernel @ per_class - rhs))
    if residual > RESIDUAL_RTOL * np.max(np.abs(rhs)):
        raise NumericError(
            f"sojourn solve residual {residual:.3e} exceeds tolerance for "
            f"{params.describe()}"
        )
    # A job's expected sojourn can never undercut its own mean service time.
    if np.any(per_class < (1.0 / params.mu) * (1.0 - 1e-12)):
        raise NumericError(
            f"solved sojourn times undercut mean service times for {params.describe()}"
        )

    shares = params.lam / params.total_arrival_rate
    return SojournSolution(per_class=per_class, aggregate=float(shares @ per_class))


def ps_sojourn(params: SystemParams) -> float:
    """Aggregate expected sojourn time under egalitarian processor sharing.

    Equals m / (1 - rho) with m the mean service requirement of a random
    arrival, m = sum_k (lambda_k / lambda) / mu_k. DPS with equal weights
    reproduces this value exactly.
    """
    shares = params.lam / params.total_arrival_rate
    mean_service = float(shares @ (1.0 / params.mu))
    return mean_service / (1.0 - params.load)


def cmu_per_class(params: SystemParams) -> np.ndarray:
    """Per-class sojourn times under preemptive-resume priority, fastest first.

    Standard M/M/1 preemptive-priority formulas with priority order
    1 > 2 > ... > M: with a_k = sum_{i<=k} rho_i and the exponential second
    moment E[S_i^2] = 2 / mu_i^2,

        T_k = (1/mu_k) / (1 - a_{k-1})
            + (sum_{i<=k} lambda_i E[S_i^2] / 2) / ((1 - a_{k-1}) (1 - a_k))
    """
    rho_k = params.rho_per_class
    a = np.cumsum(rho_k)
    a_prev = np.concatenate(([0.0], a[:-1]))
    remaining_work = np.cumsum(params.lam / params.mu**2)
    return (1.0 / params.mu) / (1.0 - a_prev) + remaining_work / (
        (1.0 - a_prev) * (1.0 - a)
    )


def cmu_sojourn(params: SystemParams) -> float:
    """Aggregate sojourn time of the rate-ordered preemptive priority queue.

    This is the optimal (c-mu rule) baseline plotted against DPS, and the
    limit of the DPS family as the weight skew grows without bound. Computed
    in closed form instead of taking that limit, which would be needlessly
    ill-conditioned; the limit is kept as a test oracle only.
    """
    shares = params.lam / params.total_arrival_rate
    return float(shares @ cmu_per_class(params))


def weight_family(x: float, class_count: int) -> WeightVector:
    """Normalized geometric weight family g_i proportional to x^(-i).

    Defined for x > 1; entries are strictly decreasing, hence the vector is
    always in the nonincreasing set. Adjacent ratios are constant (1/x), so
    larger x means stronger discrimination toward fast classes, and the
    family is ratio-dominated by any member with smaller x.
    """
    x = float(x)
    if not x > 1.0:
        raise ValueError(f"family parameter must exceed 1, got {x}")
    if class_count < 1:
        raise ValueError("class_count must be at least 1")
    # x^-(i-1), i = 1..M, then normalize; avoids underflowing x^-i for large x.
    raw = x ** (-np.arange(class_count, dtype=np.float64))
    return WeightVector(raw / np.sum(raw))


@dataclass(frozen=True)
class SweepRow:
    """One evaluated point of the weight-family sweep."""

    x: float
    weights: WeightVector
    t_dps: float
    t_ps: float
    t_opt: float


def default_sweep_grid(count: int = 60, lo: float = 1.05, hi: float = 50.0) -> np.ndarray:
    """Log-spaced family parameters used when the caller supplies no grid."""
    return np.geomspace(lo, hi, count)


def sweep(params: SystemParams, xs: Iterable[float] | Sequence[float]) -> list[SweepRow]:
    """Evaluate the aggregate DPS sojourn time along the weight family.

    Returns one row per requested x, in input order, with the processor
    sharing and priority baselines repeated on every row (they do not depend
    on x). Solve failures are re-raised with the offending x attached.
    """
    xs = [float(x) for x in xs]
    if not xs:
        raise ValueError("sweep grid must contain at least one point")
    for x in xs:
        if not x > 1.0:
            raise ValueError(f"sweep grid values must exceed 1, got {x}")

    t_ps = ps_sojourn(params)
    t_opt = cmu_sojourn(params)
    rows: list[SweepRow] = []
    for x in xs:
        g = weight_family(x, params.class_count)
        try:
            t_dps = solve_sojourn(params, g).aggregate
        except NumericError as exc:
            raise NumericError(f"sweep failed at x={x!r}: {exc}") from exc
        rows.append(SweepRow(x=x, weights=g, t_dps=t_dps, t_ps=t_ps, t_opt=t_opt))
    return rows
