"""Acceptance suite: one test per acceptance criterion, at stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL line
per criterion.
"""

from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from dpsq import (
    SystemParams,
    WeightVector,
    check_separation,
    coalesce_weights,
    compare_policies,
    contraction_factor,
    a_tilde,
    check_partial_column_sums,
    cmu_sojourn,
    mu_tilde,
    near_equal_instance,
    normalize_arrivals,
    ps_sojourn,
    sigma_matrix,
    simulate,
    SimConfig,
    sojourn_difference_expansion,
    solve_sojourn,
    split_classes,
    sweep,
    weight_family,
    y_direct,
    y_fixed_point,
    well_separated_instance,
)
from dpsq.cli import main
from dpsq.solver import default_sweep_grid

from conftest import (
    make_dominated_pair,
    make_rational_instance,
    make_separated_unit_instance,
    make_stable_instance,
    make_violating_unit_instance,
    make_weights_in_G,
)

REPO_ROOT = Path(__file__).resolve().parents[1]
SEPARATED_FILE = REPO_ROOT / "instances" / "fig1.instance"


@contextmanager
def criterion(number: int, label: str):
    try:
        yield
    except BaseException:
        print(f"[criterion {number:02d}] {label}: FAIL")
        raise
    print(f"[criterion {number:02d}] {label}: PASS")


def test_criterion_01_load_reproduction():
    with criterion(1, "load reproduction on the reference instances"):
        assert well_separated_instance().load == pytest.approx(0.911, abs=1e-3)
        assert near_equal_instance().load == pytest.approx(0.92, abs=5e-3)


def test_criterion_02_condition_verdicts():
    with criterion(2, "separation verdicts match the reference instances"):
        ok, violations = check_separation(well_separated_instance())
        assert ok and violations == ()
        ok, violations = check_separation(near_equal_instance())
        assert not ok and len(violations) == 2


def test_criterion_03_sweep_shape():
    with criterion(3, "sweep is nonincreasing and sandwiched on both instances"):
        grid = default_sweep_grid(60, 1.05, 50.0)
        for params in (well_separated_instance(), near_equal_instance()):
            rows = sweep(params, grid)
            assert len(rows) == 60
            t_dps = np.array([row.t_dps for row in rows])
            assert np.all(np.diff(t_dps) <= 1e-10)
            for row in rows:
                assert row.t_opt <= row.t_dps <= row.t_ps


def test_criterion_04_ps_reduction():
    with criterion(4, "equal weights reproduce processor sharing per class"):
        rng = np.random.default_rng(104)
        for _ in range(200):
            params = make_stable_instance(rng, max_classes=6, rho_max=0.95)
            weight = float(rng.uniform(0.2, 5.0))
            solution = solve_sojourn(
                params, WeightVector(np.full(params.class_count, weight))
            )
            expected = 1.0 / (params.mu * (1.0 - params.load))
            np.testing.assert_allclose(solution.per_class, expected, rtol=1e-9)


def test_criterion_05_certified_monotonicity():
    with criterion(5, "certified comparisons order the aggregate sojourn time"):
        rng = np.random.default_rng(105)
        for _ in range(500):
            params = make_separated_unit_instance(rng, rho_max=0.95)
            alpha, beta = make_dominated_pair(rng, params.class_count)
            report = compare_policies(params, alpha, beta)
            assert report.certified
            assert report.difference <= 1e-10


def test_criterion_06_dominance_over_ps():
    with criterion(6, "nonincreasing weights never degrade processor sharing"):
        rng = np.random.default_rng(106)
        for _ in range(500):
            params = make_stable_instance(rng, max_classes=6, rho_max=0.95)
            weights = make_weights_in_G(rng, params.class_count)
            agg = solve_sojourn(params, weights).aggregate
            assert agg <= ps_sojourn(params) + 1e-10


def test_criterion_07_supporting_machinery():
    with criterion(7, "supporting identity and ordering checks hold"):
        rng = np.random.default_rng(107)

        # interaction coefficient identities, 1e-12 relative
        for _ in range(100):
            params = make_stable_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            sig = sigma_matrix(params, g)
            weighted = sig * g.g[:, None]
            np.testing.assert_allclose(weighted, weighted.T, rtol=1e-12)
            mixed = sig / params.mu[:, None]
            np.testing.assert_allclose(
                mixed + mixed.T,
                1.0 / (params.mu[:, None] * params.mu[None, :]),
                rtol=1e-12,
            )

        # sign pattern of the coefficient difference for dominated pairs
        for _ in range(100):
            params = make_stable_instance(rng)
            alpha, beta = make_dominated_pair(rng, params.class_count)
            sig_a, sig_b = sigma_matrix(params, alpha), sigma_matrix(params, beta)
            upper = np.triu_indices(params.class_count)
            lower = np.tril_indices(params.class_count)
            assert np.all(sig_a[upper] <= sig_b[upper] + 1e-12)
            assert np.all(sig_a[lower] >= sig_b[lower] - 1e-12)

        # difference expansion equals the direct difference, 1e-9 relative
        for _ in range(100):
            params = make_separated_unit_instance(rng)
            alpha, beta = make_dominated_pair(rng, params.class_count)
            expansion = sojourn_difference_expansion(params, alpha, beta)
            direct = (
                solve_sojourn(params, alpha).aggregate
                - solve_sojourn(params, beta).aggregate
            )
            assert expansion == pytest.approx(direct, rel=1e-9, abs=1e-15)

        # y ordering under separation, for the solve and for every iterate
        for _ in range(100):
            params = make_separated_unit_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            y = y_direct(params, g).y
            slack = 1e-12 * max(1.0, float(np.max(y)))
            assert np.all(np.diff(y) <= slack)
            mu_t = mu_tilde(params, g)
            update = a_tilde(params, g)
            iterate = np.zeros(params.class_count)
            for _ in range(200):
                iterate = mu_t + iterate @ update
                slack = 1e-12 * max(1.0, float(np.max(iterate)))
                assert np.all(np.diff(iterate) <= slack)

        # contraction inequality with the computed factor, 100 vectors each
        for _ in range(100):
            params = make_separated_unit_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            q = contraction_factor(params, g)
            update = a_tilde(params, g)
            xs = rng.uniform(0.0, 5.0, (params.class_count, 100))
            assert np.all(
                np.sum(update @ xs, axis=0) <= q * np.sum(xs, axis=0) + 1e-12
            )

        # fixed point agrees with the direct solve, 1e-8 infinity norm
        for _ in range(100):
            params = make_separated_unit_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            gap = np.max(
                np.abs(y_fixed_point(params, g).y - y_direct(params, g).y)
            )
            assert gap <= 1e-8

        # transformed rates nonincreasing under separation
        for _ in range(100):
            params = make_separated_unit_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            mu_t = mu_tilde(params, g)
            assert np.all(np.diff(mu_t) <= 1e-12 * max(1.0, float(mu_t[0])))

        # partial column sums ordered for nonincreasing weights
        for _ in range(100):
            params = make_separated_unit_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            assert check_partial_column_sums(params, g)


def test_criterion_08_arrival_reductions():
    with criterion(8, "class splitting and arrival normalization preserve sojourns"):
        rng = np.random.default_rng(108)
        for _ in range(100):
            params, q, p = make_rational_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            expanded, expanded_g = split_classes(params, g, q, p)
            assert solve_sojourn(expanded, expanded_g).aggregate == pytest.approx(
                solve_sojourn(params, g).aggregate, rel=1e-9
            )
        for _ in range(100):
            m = int(rng.integers(1, 7))
            common = float(rng.uniform(0.2, 3.0))
            mu = np.sort(rng.uniform(0.5, 50.0, m))[::-1]
            # scale the rates so the load hits a stable target exactly
            mu *= common * np.sum(1.0 / mu) / rng.uniform(0.2, 0.95)
            params = SystemParams(lam=np.full(m, common), mu=mu)
            g = make_weights_in_G(rng, m)
            unit, unit_g = normalize_arrivals(params, g)
            np.testing.assert_allclose(
                solve_sojourn(unit, unit_g).per_class,
                common * solve_sojourn(params, g).per_class,
                rtol=1e-9,
            )


def test_criterion_09_coalescing_restores_y_ordering():
    with criterion(9, "coalesced weights restore the y ordering at violating pairs"):
        rng = np.random.default_rng(109)
        for _ in range(100):
            params = make_violating_unit_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            _, violations = check_separation(params)
            assert violations
            coalesced = coalesce_weights(params, g)
            y = y_direct(params, coalesced).y
            slack = 1e-12 * max(1.0, float(np.max(np.abs(y))))
            for violation in violations:
                j = violation.pair_index - 1
                assert y[j] >= y[j + 1] - slack


def test_criterion_10_simulator_agreement():
    with criterion(10, "simulation matches the analytic sojourn times"):
        g = weight_family(2.0, 3)
        params = well_separated_instance()
        estimate = simulate(params, g, SimConfig(seed=1010, arrivals_target=200_000))
        analytic = solve_sojourn(params, g).per_class
        tolerance = np.maximum(3.0 * estimate.per_class_stderr, 0.02 * analytic)
        assert np.all(np.abs(estimate.per_class_mean - analytic) <= tolerance)

        rng = np.random.default_rng(1010)
        for index in range(20):
            params = make_stable_instance(rng, max_classes=4, rho_max=0.9)
            weights = make_weights_in_G(rng, params.class_count)
            target = max(1000, -(-200_000 // params.class_count))
            estimate = simulate(
                params, weights, SimConfig(seed=2000 + index, arrivals_target=target)
            )
            assert int(np.sum(estimate.completed)) >= 200_000
            analytic = solve_sojourn(params, weights).per_class
            tolerance = np.maximum(3.0 * estimate.per_class_stderr, 0.02 * analytic)
            assert np.all(np.abs(estimate.per_class_mean - analytic) <= tolerance)


def test_criterion_11_byte_identical_outputs(tmp_path):
    with criterion(11, "sweep and simulate command outputs are byte identical"):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (first, second):
            assert main(["sweep", str(SEPARATED_FILE), "--out", str(out)]) == 0
        assert first.read_bytes() == second.read_bytes()

        for out in (first, second):
            code = main(
                [
                    "simulate",
                    str(SEPARATED_FILE),
                    "--seed",
                    "77",
                    "--target",
                    "20000",
                    "--out",
                    str(out),
                ]
            )
            assert code == 0
        assert first.read_bytes() == second.read_bytes()
