"""Hunt for monotonicity violations when the separation condition fails.

The separation condition mu_(j+1)/mu_j <= 1 - rho is sufficient for the
certified ordering, not necessary. The near-equal shipped instance violates
it on every pair, yet its sweep is still monotone. Whether a violating
instance can break the ordering at all is an open question; this script
searches randomized instances and weight pairs for a counterexample and
reports what it finds, without asserting anything.

Every instance drawn here is stable, has unit arrival rates, violates
separation on at least one adjacent pair, and is probed with random
ratio-dominated nonincreasing weight pairs. A "violation" means
T(alpha) > T(beta) + 1e-9 despite alpha dominating beta.
"""

import numpy as np

from dpsq import SystemParams, WeightVector, check_separation, solve_sojourn

TRIALS = 2000
PAIRS_PER_INSTANCE = 4
SLACK = 1e-9


def violating_instance(rng: np.random.Generator) -> SystemParams:
    m = int(rng.integers(2, 6))
    rho = float(rng.uniform(0.3, 0.95))
    gap = 1.0 - rho
    n_pairs = m - 1
    violate = rng.random(n_pairs) < 0.6
    violate[int(rng.integers(0, n_pairs))] = True
    ratios = np.where(
        violate,
        np.minimum(0.995, gap * rng.uniform(1.2, 6.0, n_pairs)),
        gap * rng.uniform(0.2, 0.95, n_pairs),
    )
    mu = np.multiply.accumulate(np.concatenate(([1.0], ratios)))
    mu *= np.sum(1.0 / mu) / rho
    return SystemParams(lam=np.ones(m), mu=mu)


def dominated_pair(rng: np.random.Generator, m: int):
    beta_ratios = rng.uniform(0.15, 1.0, m - 1)
    alpha_ratios = beta_ratios * rng.uniform(0.15, 1.0, m - 1)
    alpha = np.multiply.accumulate(np.concatenate(([1.0], alpha_ratios)))
    beta = np.multiply.accumulate(np.concatenate(([1.0], beta_ratios)))
    return WeightVector(alpha), WeightVector(beta)


def main() -> None:
    rng = np.random.default_rng(20240817)
    checked = 0
    worst_gap = -np.inf
    worst_case = None
    violations = []

    for _ in range(TRIALS):
        params = violating_instance(rng)
        ok, pairs = check_separation(params)
        assert not ok
        for _ in range(PAIRS_PER_INSTANCE):
            alpha, beta = dominated_pair(rng, params.class_count)
            t_alpha = solve_sojourn(params, alpha).aggregate
            t_beta = solve_sojourn(params, beta).aggregate
            gap = t_alpha - t_beta
            checked += 1
            if gap > worst_gap:
                worst_gap = gap
                worst_case = (params, alpha, beta, len(pairs))
            if gap > SLACK:
                violations.append((params, alpha, beta, gap))

    print(f"checked {checked} dominated weight pairs on instances that violate")
    print("the separation condition on at least one adjacent pair")
    print(f"ordering violations found: {len(violations)}")
    params, alpha, beta, n_viol = worst_case
    print(f"largest observed difference T(alpha) - T(beta): {worst_gap:+.3e}")
    print(f"  at instance {params.describe()}")
    print(f"  with {n_viol} violating pair(s), alpha = "
          f"{np.array2string(alpha.g, precision=4)}, beta = "
          f"{np.array2string(beta.g, precision=4)}")
    if violations:
        print()
        print("counterexamples recorded above: the condition is not just")
        print("an artifact of the proof on these instances.")
    else:
        print()
        print("no counterexample in this search: the ordering held on every")
        print("probed instance even without separation, supporting the view")
        print("that the condition is sufficient but far from necessary.")


if __name__ == "__main__":
    main()
