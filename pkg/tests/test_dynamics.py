"""State-model simulation: determinism, moment calibration, steady states."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from ppfilter.dynamics import (LinearDrift, SeriesDrift, StateModel, StatePath,
                               sample_initial_state, simulate_path,
                               simulate_path_batch, steady_state_prior,
                               tabulate_control, time_grid)
from ppfilter.errors import (InvalidStepError, NotPositiveDefiniteError,
                             UnstableDynamicsError)


class TestGrid:
    def test_nodes(self):
        grid = time_grid(1.0, 0.25)
        assert_allclose(grid, [0.0, 0.25, 0.5, 0.75, 1.0], rtol=1e-15)

    def test_rejects_bad_steps(self):
        with pytest.raises(InvalidStepError):
            time_grid(1.0, 0.0)
        with pytest.raises(InvalidStepError):
            time_grid(-1.0, 0.1)
        with pytest.raises(InvalidStepError):
            time_grid(1.0, 0.3)  # not an integer number of steps


class TestDrift:
    def test_linear_batch(self):
        drift = LinearDrift([[0.0, 1.0], [-1.0, 0.0]])
        x = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert_allclose(drift(x), x @ drift.matrix.T, rtol=1e-15)
        with pytest.raises(ValueError):
            LinearDrift(np.ones((2, 3)))

    def test_series_scalar(self):
        drift = SeriesDrift.scalar({1: -1.0, 3: 0.1})
        assert drift.max_degree == 3
        xs = np.array([-2.0, 0.0, 0.5, 3.0])
        assert_allclose(drift(xs[:, None])[:, 0], -xs + 0.1 * xs ** 3,
                        rtol=1e-15)
        assert drift(np.array([2.0])) == pytest.approx(-2.0 + 0.8)

    def test_series_2d(self):
        # drift (x, y) -> (-x + 0.5 y^2, x y)
        drift = SeriesDrift((
            ((1, 0), [-1.0, 0.0]),
            ((0, 2), [0.5, 0.0]),
            ((1, 1), [0.0, 1.0]),
        ))
        out = drift(np.array([2.0, 3.0]))
        assert_allclose(out, [-2.0 + 4.5, 6.0], rtol=1e-15)

    def test_series_validation(self):
        with pytest.raises(ValueError):
            SeriesDrift.scalar({-1: 1.0})
        with pytest.raises(ValueError):
            SeriesDrift((((1, 0), [1.0, 0.0]), ((2,), [1.0])))
        with pytest.raises(ValueError):
            SeriesDrift(())


class TestStateModel:
    def test_scalar_helper(self):
        model = StateModel.scalar(-0.5, 0.3, mean0=1.0, var0=2.0)
        assert model.dim == 1
        assert model.drift.matrix[0, 0] == -0.5
        assert model.initial_cov[0, 0] == 2.0

    def test_rejects_indefinite_initial_cov(self):
        with pytest.raises(NotPositiveDefiniteError):
            StateModel(LinearDrift(-np.eye(2)), np.eye(2), np.zeros(2),
                       [[1.0, 2.0], [2.0, 1.0]])

    def test_point_mass_initial_state(self):
        model = StateModel.scalar(0.0, 0.0, mean0=0.5, var0=0.0)
        rng = np.random.default_rng(0)
        assert sample_initial_state(model, rng)[0] == 0.5


class TestSimulatePath:
    def test_deterministic_replay(self):
        model = StateModel.scalar(-1.0, 0.5, var0=1.0)
        p1 = simulate_path(model, 1.0, 1e-3, 42)
        p2 = simulate_path(model, 1.0, 1e-3, 42)
        assert_array_equal(p1.states, p2.states)
        p3 = simulate_path(model, 1.0, 1e-3, 43)
        assert np.any(p3.states != p1.states)

    def test_static_state_is_constant(self):
        model = StateModel.scalar(0.0, 0.0, mean0=0.5, var0=0.0)
        path = simulate_path(model, 2.0, 1e-2, 7)
        assert_array_equal(path.states, np.full((201, 1), 0.5))

    def test_batch_matches_single(self):
        model = StateModel.scalar(-0.7, 0.4, mean0=0.2, var0=0.5)
        seeds = [[9, 1, i] for i in range(5)]
        batch = simulate_path_batch(model, 0.5, 1e-3, seeds)
        for i, seed in enumerate(seeds):
            single = simulate_path(model, 0.5, 1e-3, seed)
            assert_array_equal(batch[i], single.states)

    def test_control_input_accumulates(self):
        model = StateModel.scalar(0.0, 0.0, mean0=1.0, var0=0.0,
                                  control=lambda t: np.array([2.0]))
        path = simulate_path(model, 1.0, 0.25, 0)
        assert_allclose(path.states[:, 0], [1.0, 1.5, 2.0, 2.5, 3.0],
                        rtol=1e-15)

    def test_tabulate_control_defaults_to_zero(self):
        out = tabulate_control(None, np.arange(3.0), 2)
        assert_array_equal(out, np.zeros((3, 2)))

    def test_state_before(self):
        path = StatePath(times=np.array([0.0, 0.1, 0.2]),
                         states=np.array([[0.0], [1.0], [2.0]]))
        assert path.state_before(0.15)[0] == 1.0
        assert path.state_before(0.1)[0] == 1.0
        assert path.state_before(-0.5)[0] == 0.0

    def test_brownian_variance(self):
        # a=0, d=1: Var(X_t) = t exactly for the Euler scheme.
        model = StateModel.scalar(0.0, 1.0)
        states = simulate_path_batch(model, 1.0, 4e-3, list(range(10_000)))
        var = np.var(states[:, -1, 0])
        assert abs(var - 1.0) < 0.05

    def test_linear_moments_match_discrete_recursion(self):
        # The exact law of the Euler chain: mean m_{k+1} = (1+a dt) m_k,
        # var v_{k+1} = (1+a dt)^2 v_k + d^2 dt. Monte Carlo must match it.
        a, d, dt, horizon = -1.0, 0.5, 4e-3, 1.0
        model = StateModel.scalar(a, d, mean0=2.0, var0=0.0)
        count = 6000
        states = simulate_path_batch(model, horizon, dt,
                                     [[1, i] for i in range(count)])
        steps = states.shape[1] - 1
        mean_exact = 2.0 * (1.0 + a * dt) ** steps
        var_exact = 0.0
        for _ in range(steps):
            var_exact = (1.0 + a * dt) ** 2 * var_exact + d * d * dt
        end = states[:, -1, 0]
        se_mean = end.std(ddof=1) / math.sqrt(count)
        assert abs(end.mean() - mean_exact) < 4.0 * se_mean
        se_var = var_exact * math.sqrt(2.0 / (count - 1))
        assert abs(end.var(ddof=1) - var_exact) < 4.0 * se_var

    def test_halving_dt_within_monte_carlo_error(self):
        model = StateModel.scalar(-1.0, 0.5, var0=0.125)
        coarse = simulate_path_batch(model, 1.0, 4e-3,
                                     [[2, i] for i in range(4000)])[:, -1, 0]
        fine = simulate_path_batch(model, 1.0, 2e-3,
                                   [[3, i] for i in range(4000)])[:, -1, 0]
        se = math.hypot(coarse.std(ddof=1), fine.std(ddof=1)) / math.sqrt(4000)
        assert abs(coarse.mean() - fine.mean()) < 3.0 * se
        var_se = 0.125 * math.sqrt(2.0 / 4000)
        assert abs(coarse.var(ddof=1) - fine.var(ddof=1)) < 3.0 * math.sqrt(2) * var_se


class TestSteadyState:
    def test_scalar_hand_values(self):
        assert steady_state_prior(StateModel.scalar(-1.0, 0.5)).variance \
            == pytest.approx(0.125, rel=1e-12)
        assert steady_state_prior(StateModel.scalar(-0.1, 0.5)).variance \
            == pytest.approx(1.25, rel=1e-12)

    def test_2d_decoupled(self):
        model = StateModel(LinearDrift(-np.eye(2)), np.eye(2), np.zeros(2),
                           np.zeros((2, 2)))
        prior = steady_state_prior(model)
        assert_allclose(prior.cov, 0.5 * np.eye(2), atol=1e-12)

    def test_lyapunov_residual(self):
        # Independent check: the returned covariance must satisfy
        # A S + S A' + D D' = 0.
        rng = np.random.default_rng(23)
        for _ in range(10):
            a = rng.standard_normal((3, 3))
            a -= (np.max(np.linalg.eigvals(a).real) + 0.5) * np.eye(3)
            d = rng.standard_normal((3, 3))
            model = StateModel(LinearDrift(a), d, np.zeros(3), np.zeros((3, 3)))
            cov = steady_state_prior(model).cov
            residual = a @ cov + cov @ a.T + d @ d.T
            assert np.max(np.abs(residual)) < 1e-10 * (1.0 + np.max(np.abs(cov)))

    def test_empirical_long_run(self):
        model = StateModel.scalar(-1.0, 0.5, var0=0.0)
        count = 10_000
        states = simulate_path_batch(model, 10.0, 1e-2,
                                     [[5, i] for i in range(count)])[:, -1, 0]
        se_mean = states.std(ddof=1) / math.sqrt(count)
        assert abs(states.mean()) < 3.0 * se_mean
        se_var = 0.125 * math.sqrt(2.0 / count)
        # 3 SE plus the O(dt) Euler bias margin
        assert abs(states.var(ddof=1) - 0.125) < 3.0 * se_var + 7e-4

    def test_unstable_rejected(self):
        with pytest.raises(UnstableDynamicsError):
            steady_state_prior(StateModel.scalar(0.1, 0.5))

    def test_series_drift_rejected(self):
        model = StateModel(SeriesDrift.scalar({1: -1.0}), np.eye(1),
                           np.zeros(1), np.zeros((1, 1)))
        with pytest.raises(ValueError):
            steady_state_prior(model)
