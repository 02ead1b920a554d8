"""Tests for the sojourn-time solver, baselines, weight family, and sweep."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpsq import (
    SystemParams,
    WeightVector,
    check_ratio_dominance,
    cmu_sojourn,
    ps_sojourn,
    solve_sojourn,
    sweep,
    weight_family,
)
from dpsq.solver import cmu_per_class

from conftest import make_stable_instance, make_weights_in_G


class TestSolveSojourn:
    def test_single_class_matches_processor_sharing(self):
        params = SystemParams(lam=[0.5], mu=[1.0])
        for g in ([1.0], [7.3]):
            solution = solve_sojourn(params, WeightVector(g))
            assert solution.per_class[0] == pytest.approx(2.0, rel=1e-12)
            assert solution.aggregate == pytest.approx(2.0, rel=1e-12)

    def test_equal_weights_reduce_to_ps_on_reference(self, well_separated):
        solution = solve_sojourn(well_separated, WeightVector([1.0, 1.0, 1.0]))
        expected = 1.0 / (well_separated.mu * (1.0 - well_separated.load))
        np.testing.assert_allclose(solution.per_class, expected, rtol=1e-12)
        assert solution.per_class[2] == pytest.approx(9.3645, abs=1e-4)

    def test_two_class_hand_oracle(self):
        # Independent oracle: the 2x2 system solved exactly by hand for
        # lam=(1,1), mu=(4,2), g=(2,1) gives T = (5/7, 15/7).
        params = SystemParams(lam=[1.0, 1.0], mu=[4.0, 2.0])
        solution = solve_sojourn(params, WeightVector([2.0, 1.0]))
        np.testing.assert_allclose(
            solution.per_class, [5.0 / 7.0, 15.0 / 7.0], rtol=1e-12
        )
        assert solution.aggregate == pytest.approx(10.0 / 7.0, rel=1e-12)

    def test_equal_weight_reduction_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            params = make_stable_instance(rng)
            g = WeightVector(np.full(params.class_count, float(rng.uniform(0.2, 5.0))))
            solution = solve_sojourn(params, g)
            expected = 1.0 / (params.mu * (1.0 - params.load))
            np.testing.assert_allclose(solution.per_class, expected, rtol=1e-9)

    def test_scale_invariance(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            params = make_stable_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            base = solve_sojourn(params, g).per_class
            scaled = solve_sojourn(params, g.scaled(float(rng.uniform(0.01, 50.0)))).per_class
            np.testing.assert_allclose(scaled, base, rtol=1e-12)

    def test_solution_consistency(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            params = make_stable_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            solution = solve_sojourn(params, g)
            shares = params.lam / params.total_arrival_rate
            assert solution.aggregate == pytest.approx(
                float(shares @ solution.per_class), rel=1e-12
            )
            assert np.all(solution.per_class >= 1.0 / params.mu * (1 - 1e-12))

    def test_pairing_enforced(self):
        params = SystemParams(lam=[1.0], mu=[2.0])
        with pytest.raises(ValueError):
            solve_sojourn(params, WeightVector([1.0, 2.0]))

    def test_residual_bound_holds_externally(self):
        from dpsq import build_matrices

        rng = np.random.default_rng(17)
        for _ in range(25):
            params = make_stable_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            solution = solve_sojourn(params, g)
            mats = build_matrices(params, g)
            kernel = np.eye(params.class_count) - mats.D - mats.A
            rhs = 1.0 / params.mu
            residual = np.max(np.abs(kernel @ solution.per_class - rhs))
            assert residual <= 1e-10 * np.max(np.abs(rhs))

    def test_solvable_even_when_coefficient_rows_exceed_one(self):
        # valid stable instances can push a row sum of A + D above 1, so
        # solvability must not be gated on row sums; the PS closed form
        # still pins the answer here
        from dpsq import build_matrices

        params = SystemParams(lam=[5.0, 0.45], mu=[10.0, 1.0])
        g = WeightVector([1.0, 1.0])
        mats = build_matrices(params, g)
        assert np.max(mats.B.sum(axis=1)) > 1.0
        solution = solve_sojourn(params, g)
        expected = 1.0 / (params.mu * (1.0 - params.load))
        np.testing.assert_allclose(solution.per_class, expected, rtol=1e-10)


class TestBaselines:
    def test_ps_single_class(self):
        assert ps_sojourn(SystemParams(lam=[0.5], mu=[1.0])) == pytest.approx(2.0)

    def test_ps_reference_value(self, well_separated):
        assert ps_sojourn(well_separated) == pytest.approx(3.4125, abs=1e-4)

    def test_equal_weight_aggregate_equals_ps(self):
        rng = np.random.default_rng(14)
        for _ in range(25):
            params = make_stable_instance(rng)
            solution = solve_sojourn(params, WeightVector(np.ones(params.class_count)))
            assert solution.aggregate == pytest.approx(ps_sojourn(params), rel=1e-9)

    def test_cmu_single_class_equals_ps(self):
        params = SystemParams(lam=[0.5], mu=[1.0])
        assert cmu_sojourn(params) == pytest.approx(ps_sojourn(params), rel=1e-12)

    def test_cmu_below_ps_on_reference(self, well_separated):
        assert cmu_sojourn(well_separated) < ps_sojourn(well_separated)

    def test_cmu_is_skewed_weight_limit_on_reference(self, well_separated):
        dps = solve_sojourn(well_separated, weight_family(1e6, 3)).aggregate
        assert dps == pytest.approx(cmu_sojourn(well_separated), rel=1e-3)

    def test_cmu_is_skewed_weight_limit_two_class(self):
        params = SystemParams(lam=[1.0, 1.0], mu=[4.0, 2.0])
        dps = solve_sojourn(params, WeightVector([1e8, 1.0])).aggregate
        assert dps == pytest.approx(cmu_sojourn(params), rel=1e-4)

    def test_cmu_per_class_sane(self, well_separated):
        per_class = cmu_per_class(well_separated)
        # the top-priority class sees a nearly empty queue; the last class
        # absorbs the backlog and must be slower than under equal sharing
        assert per_class[0] == pytest.approx(
            1.0 / (well_separated.mu[0] * (1.0 - well_separated.rho_per_class[0])),
            rel=1e-9,
        )
        assert per_class[2] > 1.0 / (well_separated.mu[2] * (1.0 - well_separated.load))


class TestWeightFamily:
    def test_known_values(self):
        g = weight_family(2.0, 3)
        np.testing.assert_allclose(g.g, [4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0], rtol=1e-15)

    def test_limit_toward_equal_weights(self):
        g = weight_family(1.0 + 1e-9, 3)
        np.testing.assert_allclose(g.g, [1.0 / 3.0] * 3, atol=1e-9)

    def test_rejects_x_at_or_below_one(self):
        for x in (1.0, 0.5, -2.0):
            with pytest.raises(ValueError):
                weight_family(x, 3)

    def test_normalized_and_decreasing(self):
        for x in (1.01, 2.0, 50.0, 1e6):
            g = weight_family(x, 4)
            assert np.sum(g.g) == pytest.approx(1.0, abs=1e-12)
            assert np.all(np.diff(g.g) < 0)

    @settings(max_examples=80, deadline=None)
    @given(
        st.floats(1.0001, 1e6, allow_nan=False),
        st.floats(1.0001, 1e6, allow_nan=False),
        st.integers(2, 8),
    )
    def test_family_members_are_ratio_ordered(self, x, y, m):
        # the member with the larger parameter is ratio-dominated by the other
        stronger, weaker = max(x, y), min(x, y)
        assert check_ratio_dominance(
            weight_family(stronger, m), weight_family(weaker, m)
        )


class TestSweep:
    def test_reference_grid_monotone_and_bounded(self, well_separated):
        rows = sweep(well_separated, [1.1, 2.0, 5.0, 10.0])
        t_dps = [row.t_dps for row in rows]
        assert all(b <= a + 1e-10 for a, b in zip(t_dps, t_dps[1:]))
        for row in rows:
            assert row.t_opt <= row.t_dps <= row.t_ps + 1e-10

    def test_near_equal_grid_monotone(self, near_equal):
        # monotone even though the separation condition fails here
        rows = sweep(near_equal, [1.1, 2.0, 5.0, 10.0])
        t_dps = [row.t_dps for row in rows]
        assert all(b <= a + 1e-10 for a, b in zip(t_dps, t_dps[1:]))

    def test_baselines_constant_and_order_preserved(self, well_separated):
        xs = [5.0, 1.3, 2.0]
        rows = sweep(well_separated, xs)
        assert [row.x for row in rows] == xs
        assert len({row.t_ps for row in rows}) == 1
        assert len({row.t_opt for row in rows}) == 1

    def test_duplicate_points_give_identical_rows(self, well_separated):
        row_a, row_b = sweep(well_separated, [2.0, 2.0])
        assert row_a.t_dps == row_b.t_dps
        np.testing.assert_array_equal(row_a.weights.g, row_b.weights.g)

    def test_rejects_bad_grids(self, well_separated):
        with pytest.raises(ValueError):
            sweep(well_separated, [])
        with pytest.raises(ValueError):
            sweep(well_separated, [2.0, 1.0])


class TestDominance:
    def test_nonincreasing_weights_never_beat_ps_sample(self):
        rng = np.random.default_rng(15)
        for _ in range(50):
            params = make_stable_instance(rng)
            g = make_weights_in_G(rng, params.class_count)
            assert solve_sojourn(params, g).aggregate <= ps_sojourn(params) + 1e-10

    def test_family_sandwiched_between_baselines(self):
        rng = np.random.default_rng(16)
        for _ in range(25):
            params = make_stable_instance(rng)
            x = float(rng.uniform(1.05, 30.0))
            agg = solve_sojourn(params, weight_family(x, params.class_count)).aggregate
            assert cmu_sojourn(params) <= agg + 1e-10
            assert agg <= ps_sojourn(params) + 1e-10
