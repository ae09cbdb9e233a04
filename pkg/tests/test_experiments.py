"""Experiment harness: seeding, the vectorized scalar engine, reports."""

import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from ppfilter.dynamics import StateModel, time_grid
from ppfilter.encoding import EncoderParams
from ppfilter.errors import PpfilterError
from ppfilter.experiments import (ExperimentConfig, _cell_data,
                                  _filter_scalar_batch, _run_scalar_cell,
                                  compare_uniform, path_seed, pf_seed,
                                  run_trial, silence_variance_rate,
                                  spike_seed, sweep_center, sweep_population,
                                  validate_oracle, variance_vs_mse,
                                  window_metrics, window_node_mask)
from ppfilter.filtering import (FilterDiagnostics, FilterMode, FilterResult,
                                between_spike_derivative, run_filter)
from ppfilter.gaussian import GaussianBelief

ENC = EncoderParams.scalar(center=0.0, pop_var=1.0, tc_var=0.2, rate_scale=10.0)


def make_config(**overrides):
    base = dict(
        model=StateModel.scalar(-1.0, 0.5, var0=0.125),
        encoder=ENC,
        horizon=2.0,
        dt=1e-3,
        window=(1.0, 2.0),
        trials=3,
        master_seed=7,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestSeedsAndConfig:
    def test_stream_keys(self):
        assert path_seed(5, 3) == [5, 1, 3]
        assert spike_seed(5, 3, 2) == [5, 2, 3, 2]
        assert pf_seed(5, 3) == [5, 3, 3]

    def test_window_validation(self):
        with pytest.raises(ValueError):
            make_config(window=(1.0, 3.0))
        with pytest.raises(ValueError):
            make_config(window=(1.5, 1.0))
        with pytest.raises(ValueError):
            make_config(trials=0)

    def test_effective_init(self):
        cfg = make_config()
        init = cfg.effective_init()
        assert init.mean[0] == 0.0
        assert init.variance == 0.125
        prior = GaussianBelief.scalar(0.3, 1.0)
        assert make_config(filter_init=prior).effective_init() is prior


class TestWindowMetrics:
    def test_mask_excludes_right_edge(self):
        times = time_grid(1.0, 0.1)
        mask = window_node_mask(times, (0.5, 1.0))
        assert_array_equal(np.nonzero(mask)[0], [5, 6, 7, 8, 9])

    def test_hand_values(self):
        times = time_grid(1.0, 0.1)
        nodes = times.size
        result = FilterResult(
            times=times,
            means=np.zeros((nodes, 1)),
            covs=np.full((nodes, 1, 1), 2.0),
            diagnostics=FilterDiagnostics(np.zeros(nodes), np.ones(nodes), 0),
        )
        ise, mean_var = window_metrics(np.ones((nodes, 1)), result, (0.5, 1.0))
        assert_allclose(ise, 0.5, rtol=1e-12)
        assert_allclose(mean_var, 2.0, rtol=1e-12)


class TestRunTrial:
    def test_deterministic_and_paired(self):
        cfg = make_config(trials=1)
        modes = (FilterMode.FULL_ADF, FilterMode.UNIFORM_CODING)
        a = run_trial(cfg, 0, modes=modes)
        b = run_trial(cfg, 0, modes=modes)
        assert_array_equal(a.path.states, b.path.states)
        assert_array_equal(a.train.times, b.train.times)
        assert_array_equal(a.results["full_adf"].means,
                           b.results["full_adf"].means)
        assert set(a.integrated_se) == {"full_adf", "uniform_coding"}
        assert a.spike_count == len(a.train)

    def test_paths_shared_across_cells(self):
        cfg = make_config(trials=1)
        a = run_trial(cfg, 0, cell_index=0)
        b = run_trial(cfg, 0, cell_index=1)
        assert_array_equal(a.path.states, b.path.states)
        assert not np.array_equal(a.train.times, b.train.times)

    def test_particle_label(self):
        cfg = make_config(trials=1, horizon=0.5, window=(0.2, 0.5))
        rec = run_trial(cfg, 0, pf_count=200)
        assert "particle" in rec.results
        assert "particle" in rec.integrated_se

    def test_dense_spiking_pins_static_state(self):
        # a hot static population makes the window error small
        model = StateModel.scalar(0.0, 0.0, var0=1.0)
        enc = EncoderParams.scalar(0.0, 1.0, 0.1, 200.0)
        cfg = make_config(model=model, encoder=enc, trials=3)
        for trial in range(cfg.trials):
            rec = run_trial(cfg, trial)
            window_len = cfg.window[1] - cfg.window[0]
            assert rec.integrated_se["full_adf"] / window_len < 0.01


class TestScalarBatchEngine:
    @pytest.mark.parametrize("mode", [FilterMode.FULL_ADF,
                                      FilterMode.UNIFORM_CODING])
    def test_matches_run_filter(self, mode):
        enc = EncoderParams.scalar(0.3, 1.0, 0.2, 10.0)
        cfg = make_config(encoder=enc, trials=4)
        times, paths, trains = _cell_data(cfg, enc, 0)
        init = cfg.effective_init()
        stats = _filter_scalar_batch(
            -1.0, 0.5, 0.3, 1.0, 0.2, 10.0,
            mode == FilterMode.UNIFORM_CODING, times, paths, trains,
            0.0, 0.125, cfg.window, collect_series=True)
        assert not stats.failed.any()
        for t in range(cfg.trials):
            ref = run_filter(cfg.model, enc, trains[t], init, cfg.dt, mode)
            assert np.max(np.abs(stats.means[t] - ref.means[:, 0])) < 1e-10
            assert np.max(np.abs(stats.vars[t] - ref.covs[:, 0, 0])) < 1e-10
            ise, wvar = window_metrics(paths[t][:, None], ref, cfg.window)
            assert_allclose(stats.integrated_se[t], ise, rtol=1e-8)
            assert_allclose(stats.window_mean_var[t], wvar, rtol=1e-8)

    def test_stiff_trials_marked_failed(self):
        model = StateModel.scalar(-4e4, 0.0, mean0=0.0, var0=0.0)
        cfg = make_config(model=model, trials=2, horizon=0.5,
                          window=(0.2, 0.5),
                          filter_init=GaussianBelief.scalar(0.0, 1.0))
        report = compare_uniform(cfg, [1.0])
        assert report.excluded[0] == 2
        assert math.isnan(report.adf_mean[0])

    def test_point_mass_needs_explicit_prior(self):
        model = StateModel.scalar(0.0, 0.0, mean0=0.5, var0=0.0)
        cfg = make_config(model=model)
        with pytest.raises(PpfilterError):
            compare_uniform(cfg, [1.0])
        ok = make_config(model=model,
                         filter_init=GaussianBelief.scalar(0.0, 1.0))
        report = compare_uniform(ok, [1.0])
        assert np.isfinite(report.adf_mean[0])


class TestCompareUniform:
    def test_matches_per_trial_runs(self):
        cfg = make_config(trials=3)
        report = compare_uniform(cfg, [1.0])
        modes = (FilterMode.FULL_ADF, FilterMode.UNIFORM_CODING)
        records = [run_trial(cfg, t, modes=modes) for t in range(3)]
        adf = [r.integrated_se["full_adf"] for r in records]
        uni = [r.integrated_se["uniform_coding"] for r in records]
        assert_allclose(report.adf_mean[0], np.mean(adf), rtol=1e-8)
        assert_allclose(report.uniform_mean[0], np.mean(uni), rtol=1e-8)
        assert_allclose(report.diff_mean[0], np.mean(np.array(adf) - uni),
                        rtol=1e-7, atol=1e-12)
        assert_allclose(report.combined_se[0],
                        math.hypot(report.adf_se[0], report.uniform_se[0]),
                        rtol=1e-12)

    def test_negligible_rate_makes_filters_agree(self):
        enc = EncoderParams.scalar(0.0, 1.0, 0.2, 1e-12)
        cfg = make_config(encoder=enc, trials=2)
        report = compare_uniform(cfg, [1.0])
        assert abs(report.diff_mean[0]) < 1e-6

    def test_thread_count_does_not_change_results(self):
        cfg = make_config(trials=2)
        serial = compare_uniform(cfg, [0.5, 2.0], threads=1)
        parallel = compare_uniform(cfg, [0.5, 2.0], threads=2)
        assert_array_equal(serial.adf_mean, parallel.adf_mean)
        assert_array_equal(serial.uniform_mean, parallel.uniform_mean)
        assert_array_equal(serial.diff_se, parallel.diff_se)

    def test_table_shape(self):
        report = compare_uniform(make_config(trials=2), [0.5, 2.0])
        header, rows = report.table()
        assert len(rows) == 2
        assert len(rows[0]) == len(header)


class TestSweeps:
    def test_center_sweep_layout_and_cross_check(self):
        enc = EncoderParams.scalar(0.0, 0.1, 0.01, 10.0)
        cfg = make_config(encoder=enc, trials=5, horizon=1.0,
                          window=(0.5, 1.0))
        centers = [0.0, 0.5]
        report = sweep_center(cfg, centers, rate_scales=[10.0, 100.0])
        cells = report.cells
        assert cells.axis_names == ("rate_scale", "center")
        assert_array_equal(cells.axis1, [10.0, 100.0])
        assert_array_equal(cells.axis2, centers)
        assert cells.mean_var.shape == (2, 2)
        assert_allclose(cells.prior_std, math.sqrt(0.125), rtol=1e-12)
        assert np.all(np.isfinite(cells.mean_var))
        # cell (rate index 0, center index 1) was run as flat cell 1
        direct_enc = dataclasses.replace(
            enc, center=[0.5], rate_scale=10.0)
        direct = _run_scalar_cell(cfg, direct_enc, 1)["full_adf"]
        assert_allclose(cells.mean_var[0, 1],
                        float(np.mean(direct.window_mean_var)), rtol=1e-12)
        assert report.optimal_center.shape == (2,)
        for c_opt, c_sil in zip(report.optimal_center, report.silence_center):
            assert c_opt in centers
            assert c_sil in centers

    def test_center_sweep_axis_validation(self):
        cfg = make_config(trials=2)
        with pytest.raises(ValueError):
            sweep_center(cfg, [0.0], rate_scales=[10.0], tc_vars=[0.1])
        with pytest.raises(ValueError):
            sweep_center(cfg, [0.0])

    def test_population_sweep(self):
        model = StateModel.scalar(0.0, 0.0, var0=1.0)
        enc = EncoderParams.scalar(0.0, 1.0, 1.0, 10.0)
        cfg = make_config(model=model, encoder=enc, trials=10, horizon=2.0,
                          window=(1.0, 2.0))
        report = sweep_population(cfg, [0.0, 1.0], [0.5, 5.0])
        assert report.cells.mean_var.shape == (2, 2)
        assert report.optimal_center in (0.0, 1.0)
        assert report.optimal_pop_var in (0.5, 5.0)
        assert report.breakdown.shape == (2, 2)
        assert report.breakdown.dtype == bool
        header, rows = report.cells_table()
        assert header[-1] == "breakdown"
        assert len(rows) == 4

    def test_population_sweep_requires_static_model(self):
        cfg = make_config()
        with pytest.raises(ValueError):
            sweep_population(cfg, [0.0], [1.0])

    def test_silence_variance_rate_is_the_ode_term(self):
        cfg = make_config()
        deriv = between_spike_derivative(
            cfg.model, ENC, GaussianBelief.scalar(0.0, 0.3),
            FilterMode.FULL_ADF)
        assert silence_variance_rate(cfg, ENC, 0.3) == deriv.dcov[0, 0]


class TestVarianceVsMse:
    def test_calibrated_filter(self):
        # Trials start from a known state; the filter carries the stationary
        # prior, so its variance begins overestimated and relaxes toward the
        # squared error.  The window ratio is heavy-tailed across trials and
        # needs ~1000 of them to stabilise.
        model = StateModel.scalar(-0.1, 0.5, mean0=0.0, var0=0.0)
        enc = EncoderParams.scalar(0.0, 0.1, 0.01, 10.0)
        cfg = make_config(model=model, encoder=enc, trials=1000, horizon=10.0,
                          window=(5.0, 10.0), master_seed=11,
                          filter_init=GaussianBelief.scalar(0.0, 1.25))
        report = variance_vs_mse(cfg)
        assert report.stationary_var == 1.25
        assert report.trials_used == 1000
        assert report.excluded == 0
        assert 0.7 < report.window_ratio < 1.3
        # variance starts at the prior, above the near-zero initial error
        assert report.mean_var[0] == 1.25
        assert report.mse[0] == 0.0
        assert report.times.size == report.mse.size == report.mean_var.size
        assert np.all(report.mean_var > 0)
        header, rows = report.table(stride=500)
        assert len(rows) == math.ceil(report.times.size / 500)
        assert len(rows[0]) == len(header)

    def test_deterministic(self):
        cfg = make_config(trials=4)
        a = variance_vs_mse(cfg)
        b = variance_vs_mse(cfg)
        assert_array_equal(a.mse, b.mse)
        assert a.window_ratio == b.window_ratio


class TestValidateOracle:
    def test_small_run_agrees_and_is_thread_stable(self):
        model = StateModel.scalar(-0.1, 0.5, mean0=0.0, var0=0.0)
        enc = EncoderParams.scalar(0.0, 0.5, 0.1, 50.0)
        cfg = make_config(model=model, encoder=enc, trials=3, horizon=1.5,
                          window=(0.5, 1.5),
                          filter_init=GaussianBelief.scalar(0.0, 1.25),
                          master_seed=13)
        report = validate_oracle(cfg, particle_count=1500)
        assert not report.failed.any()
        assert report.mean_gap_ratio < 0.5
        assert report.mean_rel_var_gap < 0.5
        assert report.sample_adf is not None
        assert report.sample_pf is not None
        assert report.sample_adf.times.shape == report.sample_pf.times.shape
        header, rows = report.table()
        assert len(rows) == 3
        assert len(rows[0]) == len(header)

        threaded = validate_oracle(cfg, particle_count=1500, threads=2)
        assert_array_equal(report.mean_abs_gap, threaded.mean_abs_gap)
        assert_array_equal(report.rel_var_gap, threaded.rel_var_gap)

    def test_requires_proper_prior(self):
        model = StateModel.scalar(0.0, 0.0, mean0=0.5, var0=0.0)
        cfg = make_config(model=model)
        with pytest.raises(PpfilterError):
            validate_oracle(cfg, particle_count=100)
