"""Shared fixtures and random-instance generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from dpsq import SystemParams, WeightVector, near_equal_instance, well_separated_instance


@pytest.fixture
def well_separated() -> SystemParams:
    return well_separated_instance()


@pytest.fixture
def near_equal() -> SystemParams:
    return near_equal_instance()


def make_stable_instance(
    rng: np.random.Generator,
    max_classes: int = 6,
    rho_min: float = 0.2,
    rho_max: float = 0.95,
) -> SystemParams:
    """Random stable instance with sorted rates and a load drawn uniformly."""
    m = int(rng.integers(1, max_classes + 1))
    mu = np.sort(rng.uniform(0.5, 50.0, m))[::-1]
    lam = rng.uniform(0.5, 1.5, m)
    lam *= rng.uniform(rho_min, rho_max) / np.sum(lam / mu)
    return SystemParams(lam=lam, mu=mu)


def make_separated_unit_instance(
    rng: np.random.Generator,
    max_classes: int = 6,
    rho_min: float = 0.3,
    rho_max: float = 0.95,
) -> SystemParams:
    """Unit-arrival instance on which the separation condition holds.

    Adjacent rate ratios are drawn strictly inside (0, 1 - rho), then the
    rate scale is fixed so the load hits the drawn target exactly (uniform
    scaling changes the load but not the ratios).
    """
    m = int(rng.integers(2, max_classes + 1))
    rho = float(rng.uniform(rho_min, rho_max))
    ratios = (1.0 - rho) * rng.uniform(0.3, 0.98, m - 1)
    mu = np.multiply.accumulate(np.concatenate(([1.0], ratios)))
    mu *= np.sum(1.0 / mu) / rho
    return SystemParams(lam=np.ones(m), mu=mu)


def make_violating_unit_instance(
    rng: np.random.Generator,
    max_classes: int = 5,
    rho_min: float = 0.3,
    rho_max: float = 0.9,
) -> SystemParams:
    """Unit-arrival instance where at least one adjacent pair violates
    separation (ratio above 1 - rho) while the queue stays stable."""
    m = int(rng.integers(2, max_classes + 1))
    rho = float(rng.uniform(rho_min, rho_max))
    slack = 1.0 - rho
    n_pairs = m - 1
    violate = rng.random(n_pairs) < 0.4
    violate[int(rng.integers(0, n_pairs))] = True
    ratios = np.where(
        violate,
        np.minimum(0.98, slack * rng.uniform(1.2, 4.0, n_pairs)),
        slack * rng.uniform(0.2, 0.95, n_pairs),
    )
    mu = np.multiply.accumulate(np.concatenate(([1.0], ratios)))
    mu *= np.sum(1.0 / mu) / rho
    return SystemParams(lam=np.ones(m), mu=mu)


def make_weights_in_G(rng: np.random.Generator, m: int) -> WeightVector:
    """Random nonincreasing weights with a random overall scale."""
    ratios = rng.uniform(0.2, 1.0, m - 1) if m > 1 else np.empty(0)
    g = np.multiply.accumulate(np.concatenate(([1.0], ratios)))
    return WeightVector(g * rng.uniform(0.5, 2.0))


def make_dominated_pair(
    rng: np.random.Generator, m: int
) -> tuple[WeightVector, WeightVector]:
    """Random (alpha, beta) both nonincreasing with alpha ratio-dominated
    by beta (alpha's adjacent ratios pointwise smaller)."""
    if m == 1:
        return WeightVector([1.0]), WeightVector([1.0])
    beta_ratios = rng.uniform(0.2, 1.0, m - 1)
    alpha_ratios = beta_ratios * rng.uniform(0.2, 1.0, m - 1)
    alpha = np.multiply.accumulate(np.concatenate(([1.0], alpha_ratios)))
    beta = np.multiply.accumulate(np.concatenate(([1.0], beta_ratios)))
    return WeightVector(alpha), WeightVector(beta)


def make_rational_instance(
    rng: np.random.Generator,
    max_classes: int = 5,
    rho_min: float = 0.2,
    rho_max: float = 0.9,
) -> tuple[SystemParams, int, list[int]]:
    """Stable instance with arrival rates p_i / q; returns (params, q, p).

    The service-rate scale is adjusted to hit the load target so the
    arrival rates keep their exact rational structure.
    """
    m = int(rng.integers(1, max_classes + 1))
    q = int(rng.integers(1, 7))
    p = [int(c) for c in rng.integers(1, 6, m)]
    lam = np.array(p, dtype=np.float64) / q
    mu = np.sort(rng.uniform(0.5, 50.0, m))[::-1]
    rho_target = float(rng.uniform(rho_min, rho_max))
    mu *= np.sum(lam / mu) / rho_target
    return SystemParams(lam=lam, mu=mu), q, p
