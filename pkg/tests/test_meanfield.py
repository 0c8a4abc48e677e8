"""Self-consistent solver: closure, anchors, goldens, branch choice."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xxzquench.meanfield import (
    MeanFieldParams,
    apply_gap_map,
    solve_self_consistent,
)
from xxzquench.model import ModelParams, mode_arrays, momentum_grid


def _closure_residual(solution):
    mapped = apply_gap_map(solution.params, solution.mf)
    return max(
        abs(mapped.u1 - solution.mf.u1),
        abs(mapped.u2 - solution.mf.u2),
        abs(mapped.u3 - solution.mf.u3),
    )


class TestClosure:
    @pytest.mark.parametrize(
        "delta,h,n",
        [
            (0.5, 0.0, 64),
            (1.0, 0.0, 128),
            (2.5, 0.3, 100),
            (0.2, 1.5, 256),
            (0.0, 0.0, 64),
        ],
    )
    def test_reapplying_map_reproduces_solution(self, delta, h, n):
        solution = solve_self_consistent(
            ModelParams(anisotropy=delta, field=h, n_sites=n)
        )
        assert solution.residual < 1e-12
        assert _closure_residual(solution) < 1e-12

    @pytest.mark.parametrize("delta", [0.0, 0.5, 0.98, 1.0, 1.7, 3.0])
    def test_half_filling_at_zero_field(self, delta):
        solution = solve_self_consistent(
            ModelParams(anisotropy=delta, field=0.0, n_sites=128)
        )
        assert solution.mf.u1 == pytest.approx(0.5, abs=1e-9)

    def test_reported_residual_matches_recomputation(self):
        solution = solve_self_consistent(ModelParams(anisotropy=0.7, n_sites=96))
        assert _closure_residual(solution) == pytest.approx(
            solution.residual, abs=1e-13
        )


class TestGoldens:
    """Converged Υ values frozen from this solver (regression pins)."""

    CASES = {
        (1.0, 0.0, 512): (0.5, -0.3138252379532763, -0.09502312996984628),
        (0.5, 2.0, 400): (0.9630201031601691, -0.01500532110591781, -0.1208333422624703),
        (0.5, 0.0, 256): (0.5, -0.285915873129149, -0.19913609880763333),
        (2.0, 0.0, 512): (0.5, -0.2914510382221425, 0.18694419870504272),
    }

    @pytest.mark.parametrize("key", sorted(CASES))
    def test_golden_solutions(self, key):
        delta, h, n = key
        solution = solve_self_consistent(
            ModelParams(anisotropy=delta, field=h, n_sites=n)
        )
        expected = self.CASES[key]
        assert solution.mf.u1 == pytest.approx(expected[0], abs=1e-9)
        assert solution.mf.u2 == pytest.approx(expected[1], abs=1e-9)
        assert solution.mf.u3 == pytest.approx(expected[2], abs=1e-9)

    def test_flat_band_fixed_point(self):
        # At Δ = 0, h = 0 the closure has the exact solution
        # (1/2, −1/4, −1/4): A_q = J cos q, B_q = −J sin q, so ε_q = J
        # for every mode and each gap-map sum evaluates in closed form.
        solution = solve_self_consistent(
            ModelParams(anisotropy=0.0, field=0.0, n_sites=256)
        )
        assert solution.mf.u1 == pytest.approx(0.5, abs=1e-9)
        assert solution.mf.u2 == pytest.approx(-0.25, abs=1e-9)
        assert solution.mf.u3 == pytest.approx(-0.25, abs=1e-9)
        _, _, _, eps, _ = solution.positive_mode_arrays()
        np.testing.assert_allclose(eps, 1.0, atol=1e-9)

    def test_determinism(self):
        params = ModelParams(anisotropy=0.9, field=0.2, n_sites=128)
        first = solve_self_consistent(params)
        second = solve_self_consistent(params)
        assert first.mf == second.mf
        assert first.residual == second.residual
        assert first.iterations == second.iterations


class TestBranchSelection:
    def test_critical_point_leaves_symmetric_branch(self):
        # The Υ₃ = 0 subspace is map-invariant at Δ = 1, but the fixed
        # point there is unstable for large chains; the solver must
        # land on the stable paired branch instead.
        solution = solve_self_consistent(
            ModelParams(anisotropy=1.0, field=0.0, n_sites=512)
        )
        assert abs(solution.mf.u3) > 0.05

    def test_branch_continuous_across_critical_point(self):
        values = []
        for delta in (0.96, 0.98, 1.0):
            solution = solve_self_consistent(
                ModelParams(anisotropy=delta, field=0.0, n_sites=256)
            )
            values.append(solution.mf.u3)
        steps = np.abs(np.diff(values))
        assert np.all(steps < 0.02)

    def test_init_override_converges_to_same_point(self):
        params = ModelParams(anisotropy=0.6, field=0.3, n_sites=128)
        default = solve_self_consistent(params)
        nudged = solve_self_consistent(
            params, init=MeanFieldParams(0.4, -0.1, -0.2)
        )
        assert nudged.mf.u1 == pytest.approx(default.mf.u1, abs=1e-10)
        assert nudged.mf.u2 == pytest.approx(default.mf.u2, abs=1e-10)
        assert nudged.mf.u3 == pytest.approx(default.mf.u3, abs=1e-10)


class TestValidation:
    def test_rejects_bad_mixing(self):
        with pytest.raises(ValueError):
            solve_self_consistent(ModelParams(n_sites=16), mixing=0.0)
        with pytest.raises(ValueError):
            solve_self_consistent(ModelParams(n_sites=16), mixing=1.5)

    def test_rejects_bad_tolerance(self):
        with pytest.raises(ValueError):
            solve_self_consistent(ModelParams(n_sites=16), tol=-1e-9)

    def test_rejects_bad_iteration_budget(self):
        with pytest.raises(ValueError):
            solve_self_consistent(ModelParams(n_sites=16), max_iter=0)

    def test_mean_field_params_box(self):
        with pytest.raises(ValueError):
            MeanFieldParams(1.2, 0.0, 0.0)
        with pytest.raises(ValueError):
            MeanFieldParams(0.5, 0.6, 0.0)
        with pytest.raises(ValueError):
            MeanFieldParams(0.5, 0.0, float("nan"))


class TestProperties:
    @settings(max_examples=25, deadline=None)
    @given(
        delta=st.floats(0.0, 3.0),
        h=st.floats(0.0, 2.5),
        n=st.sampled_from([8, 16, 32, 64]),
    )
    def test_solutions_close_and_stay_in_box(self, delta, h, n):
        solution = solve_self_consistent(
            ModelParams(anisotropy=delta, field=h, n_sites=n)
        )
        assert solution.residual < 1e-12
        assert 0.0 <= solution.mf.u1 <= 1.0
        assert abs(solution.mf.u2) <= 0.5
        assert abs(solution.mf.u3) <= 0.5
        assert _closure_residual(solution) < 1e-12

    @settings(max_examples=15, deadline=None)
    @given(delta=st.floats(0.0, 2.0), h=st.floats(0.0, 2.0))
    def test_mode_energies_match_solution_arrays(self, delta, h):
        params = ModelParams(anisotropy=delta, field=h, n_sites=32)
        solution = solve_self_consistent(params)
        q, a, b, eps, theta = solution.positive_mode_arrays()
        a2, b2, eps2 = mode_arrays(params, solution.mf, q)
        np.testing.assert_array_equal(a, a2)
        np.testing.assert_array_equal(b, b2)
        np.testing.assert_array_equal(eps, eps2)
        np.testing.assert_array_equal(q, momentum_grid(32).positive_modes)
        # the angle convention: cos 2θ = A/ε and sin 2θ = −B/ε
        np.testing.assert_allclose(np.cos(2.0 * theta) * eps, a, atol=1e-12)
        np.testing.assert_allclose(np.sin(2.0 * theta) * eps, -b, atol=1e-12)
