"""Domain model for multi-class discriminatory processor sharing (DPS) queues.

A DPS queue serves M job classes on a single server. Class k jobs arrive in a
Poisson stream with rate lambda_k and carry exponentially distributed service
requirements with mean 1/mu_k. A positive weight vector g controls the split
of capacity: with N_j class-j jobs present, every class-k job is served at
rate g_k / sum_j(g_j * N_j). Equal weights reduce the policy to egalitarian
processor sharing.

This module owns the immutable value types (system parameters, weight
vectors, rate matrices, solved sojourn times) and the coefficient algebra
that the solver, the monotonicity checks, and the simulator all build on.

Classes are numbered 1..M with nonincreasing service rates, so class 1 is
always the fastest. All public index arguments follow that 1-based
convention; storage is 0-based numpy internally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StabilityError

# Loads within this margin of 1 are rejected: the sojourn-time linear system
# degenerates as rho -> 1 and the matrix inverse loses all accuracy.
STABILITY_MARGIN = 1e-9

# Absolute slack used by every ordering predicate, so exact ties pass.
ORDER_TOL = 1e-12


def _locked(values, name: str) -> np.ndarray:
    """Copy ``values`` into a read-only, finite, strictly positive 1-d array."""
    arr = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if arr.size == 0:
        raise ValueError(f"{name} must contain at least one class")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {arr!r}")
    if not np.all(arr > 0.0):
        raise ValueError(f"{name} must be strictly positive, got {arr!r}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SystemParams:
    """A stable M-class queueing instance: arrival rates and service rates.

    ``mu`` must be nonincreasing (class 1 is the fastest class). Unsorted
    input is rejected rather than silently sorted, because a silent
    permutation would desynchronize any weight vector the caller pairs with
    the instance.
    """

    lam: np.ndarray
    mu: np.ndarray

    def __post_init__(self) -> None:
        lam = _locked(self.lam, "lam")
        mu = _locked(self.mu, "mu")
        if lam.shape != mu.shape:
            raise ValueError(
                f"lam and mu must have equal length, got {lam.size} and {mu.size}"
            )
        if np.any(mu[1:] > mu[:-1] + ORDER_TOL):
            raise ValueError(
                "service rates must be nonincreasing (class 1 fastest); "
                "renumber the classes instead of relying on auto-sorting"
            )
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)
        rho = self.load
        if rho >= 1.0 - STABILITY_MARGIN:
            raise StabilityError(
                f"offered load rho = {rho:.9f} is not safely below 1; "
                "the queue is unstable or too close to saturation"
            )

    @property
    def class_count(self) -> int:
        return int(self.mu.size)

    @property
    def rho_per_class(self) -> np.ndarray:
        return self.lam / self.mu

    @property
    def load(self) -> float:
        """Total offered load rho = sum_k lambda_k / mu_k."""
        return float(np.sum(self.lam / self.mu))

    @property
    def total_arrival_rate(self) -> float:
        return float(np.sum(self.lam))

    @property
    def unit_arrivals(self) -> bool:
        """True when every class has arrival rate exactly 1 (within 1e-12)."""
        return bool(np.all(np.abs(self.lam - 1.0) <= 1e-12))

    def describe(self) -> str:
        return (
            f"M={self.class_count}, rho={self.load:.6f}, "
            f"lam={np.array2string(self.lam, precision=6)}, "
            f"mu={np.array2string(self.mu, precision=6)}"
        )


@dataclass(frozen=True)
class WeightVector:
    """Per-class DPS weights, strictly positive.

    Membership in the nonincreasing set (weights aligned with the service
    rate ordering) is a queryable property, not an invariant: arbitrary
    weight vectors are representable so that uncertified policies can still
    be solved and simulated.
    """

    g: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "g", _locked(self.g, "g"))

    def __len__(self) -> int:
        return int(self.g.size)

    @property
    def nonincreasing(self) -> bool:
        """True when g_1 >= g_2 >= ... >= g_M (with 1e-12 slack for ties)."""
        g = self.g
        return bool(np.all(g[1:] <= g[:-1] + ORDER_TOL))

    def scaled(self, factor: float) -> "WeightVector":
        return WeightVector(self.g * float(factor))


@dataclass(frozen=True)
class RateMatrices:
    """Coefficient matrices of the sojourn-time linear system.

    ``A[i, j] = lambda_j * g_j / (mu_i g_i + mu_j g_j)`` couples class i to
    class j, ``D`` is diagonal with the row sums of A, and ``B = A + D``.
    The expected sojourn times solve ``(I - D - A) T = [1/mu_1 .. 1/mu_M]``.
    """

    A: np.ndarray
    D: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        for name in ("A", "D", "B"):
            arr = np.array(getattr(self, name), dtype=np.float64, copy=True)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValueError(f"{name} must be a square matrix")
            if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
                raise ValueError(f"{name} must be finite and nonnegative")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        off_diag = self.D[~np.eye(self.D.shape[0], dtype=bool)]
        if off_diag.size and np.any(off_diag != 0.0):
            raise ValueError("D must be exactly diagonal")


@dataclass(frozen=True)
class SojournSolution:
    """Per-class expected sojourn times and their arrival-weighted aggregate."""

    per_class: np.ndarray
    aggregate: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_class", _locked(self.per_class, "per_class"))
        aggregate = float(self.aggregate)
        if not np.isfinite(aggregate) or aggregate <= 0.0:
            raise ValueError(f"aggregate must be a positive real, got {aggregate}")
        object.__setattr__(self, "aggregate", aggregate)


def require_paired(params: SystemParams, weights: WeightVector) -> None:
    """Reject weight vectors whose length does not match the instance."""
    if len(weights) != params.class_count:
        raise ValueError(
            f"weight vector has {len(weights)} entries but the instance "
            f"has {params.class_count} classes"
        )


def sigma(params: SystemParams, weights: WeightVector, i: int, j: int) -> float:
    """Pairwise interaction coefficient g_j / (mu_i g_i + mu_j g_j).

    ``i`` and ``j`` are 1-based class indices. The coefficient is invariant
    under uniform scaling of the weight vector.
    """
    require_paired(params, weights)
    m = params.class_count
    for name, idx in (("i", i), ("j", j)):
        if not 1 <= idx <= m:
            raise IndexError(f"class index {name}={idx} out of range 1..{m}")
    prod = params.mu * weights.g
    return float(weights.g[j - 1] / (prod[i - 1] + prod[j - 1]))


def sigma_matrix(params: SystemParams, weights: WeightVector) -> np.ndarray:
    """All interaction coefficients at once; entry [i, j] is sigma(i+1, j+1)."""
    require_paired(params, weights)
    prod = params.mu * weights.g
    return weights.g[None, :] / (prod[:, None] + prod[None, :])


def build_matrices(params: SystemParams, weights: WeightVector) -> RateMatrices:
    """Assemble the A, D, B matrices of the sojourn-time linear system.

    Note: rows of B are not bounded by 1 in general (heavily skewed weights
    at high load can push a row sum above 1 on perfectly valid instances),
    so no row-sum gate is applied here. Solvability is guaranteed for every
    stable instance and is enforced downstream by the solver's conditioning
    and residual checks.
    """
    sig = sigma_matrix(params, weights)
    a = sig * params.lam[None, :]
    d = np.diag(np.sum(a, axis=1))
    return RateMatrices(A=a, D=d, B=a + d)
