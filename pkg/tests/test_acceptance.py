"""Acceptance gate for the shipped guarantees of the package.

Each test pins one end-to-end guarantee at its stated tolerance: the
Gaussian quadratic-form identity, spike updates against grid Bayes, the
expected-rate formula against numeric quadrature, generator calibration,
extreme-parameter limits, agreement with a particle-filter reference, the
three Monte Carlo experiment reproductions, and byte-level CLI determinism.
Every run is seeded; tolerances and trial counts are part of the contract
and must not be loosened to make a failing build pass.
"""

import hashlib
import json
import time

import numpy as np
from scipy import stats

from ppfilter.cli import main
from ppfilter.dynamics import StateModel, simulate_path, steady_state_prior
from ppfilter.encoding import EncoderParams, SpikeTrain, generate_spikes, total_rate
from ppfilter.experiments import (ExperimentConfig, compare_uniform, path_seed,
                                  spike_seed, sweep_center, sweep_population,
                                  validate_oracle, variance_vs_mse)
from ppfilter.filtering import (FilterMode, apply_spike, expected_total_rate,
                                run_filter)
from ppfilter.gaussian import GaussianBelief, complete_squares, quad_form

from oracles import (grid_posterior_1d, grid_posterior_2d, quad_expected_rate)


def test_quadratic_form_lemma():
    """Merging two quadratic forms reproduces their sum to 1e-10 relative,
    over 1000 random instances in dimensions 1-4 including rank-deficient,
    zero, and indefinite first weights."""
    rng = np.random.default_rng(1001)
    worst = 0.0
    for k in range(1000):
        n = int(rng.integers(1, 5))
        a = rng.normal(scale=2.0, size=n)
        b = rng.normal(scale=2.0, size=n)
        kind = k % 4
        if kind == 0:
            g = rng.normal(size=(n, n))
            weight_a = g @ g.T + 0.1 * np.eye(n)
        elif kind == 1:
            rank = int(rng.integers(0, n))
            g = rng.normal(size=(n, rank))
            weight_a = g @ g.T if rank else np.zeros((n, n))
        elif kind == 2:
            weight_a = np.zeros((n, n))
        else:
            g = rng.normal(size=(n, n))
            weight_a = 0.5 * (g + g.T)
        g = rng.normal(size=(n, n))
        weight_b = g @ g.T + 0.1 * np.eye(n)
        if kind == 3:
            weight_b = weight_b - weight_a  # keeps the sum positive definite
        dec = complete_squares(a, weight_a, b, weight_b)
        for _ in range(2):
            x = rng.normal(scale=2.0, size=n)
            lhs = quad_form(x, a, weight_a) + quad_form(x, b, weight_b)
            rhs = (quad_form(a, b, dec.cross_weight)
                   + quad_form(x, dec.combined_center, dec.combined_weight))
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs)))
    assert worst <= 1e-10, f"worst relative identity gap {worst:.3e}"


def test_spike_update_matches_grid_bayes():
    """100 random posterior-moment checks against dense grid Bayes
    (75 scalar cases on a 1e5-point grid over [-10, 10], 25 two-dimensional
    cases), all moments within 1e-4, in under one minute."""
    start = time.monotonic()
    rng = np.random.default_rng(1002)
    for _ in range(75):
        mean = float(rng.uniform(-2.0, 2.0))
        var = float(rng.uniform(0.1, 2.0))
        tc_var = float(rng.uniform(0.05, 1.0))
        theta = float(mean + rng.normal() * np.sqrt(var + tc_var))
        enc = EncoderParams.scalar(0.0, 1.0, tc_var, 10.0)
        post = apply_spike(enc, GaussianBelief.scalar(mean, var), theta)
        ref_mean, ref_var = grid_posterior_1d(mean, var, tc_var, theta)
        assert abs(post.mean[0] - ref_mean) <= 1e-4
        assert abs(post.cov[0, 0] - ref_var) <= 1e-4
    for _ in range(25):
        mean = rng.uniform(-1.0, 1.0, size=2)
        g = rng.normal(size=(2, 2))
        cov = 0.3 * (g @ g.T) + 0.2 * np.eye(2)
        row = rng.uniform(-1.5, 1.5, size=2)
        row[np.argmax(np.abs(row))] += np.sign(row[np.argmax(np.abs(row))])
        tc_var = float(rng.uniform(0.05, 0.8))
        proj = float(row @ mean)
        theta = float(proj + rng.normal()
                      * np.sqrt(row @ cov @ row + tc_var))
        enc = EncoderParams([0.0], [[1.0]], [[tc_var]], 10.0,
                            row.reshape(1, 2))
        post = apply_spike(enc, GaussianBelief(mean, cov), theta)
        ref_mean, ref_cov = grid_posterior_2d(mean, cov, row, tc_var, theta)
        assert np.max(np.abs(post.mean - ref_mean)) <= 1e-4
        assert np.max(np.abs(post.cov - ref_cov)) <= 1e-4
    assert time.monotonic() - start < 60.0


def test_expected_rate_matches_quadrature():
    """50 random scalar parameter sets: the closed-form expected total rate
    agrees with adaptive 2-D quadrature to 1e-5 relative."""
    rng = np.random.default_rng(1003)
    for _ in range(50):
        mean = float(rng.uniform(-2.0, 2.0))
        var = float(rng.uniform(0.1, 2.0))
        center = float(rng.uniform(-1.0, 1.0))
        pop_var = float(rng.uniform(0.1, 2.0))
        tc_var = float(rng.uniform(0.05, 1.0))
        rate_scale = float(rng.uniform(1.0, 50.0))
        enc = EncoderParams.scalar(center, pop_var, tc_var, rate_scale)
        g = expected_total_rate(enc, GaussianBelief.scalar(mean, var))
        ref = quad_expected_rate(mean, var, center, pop_var, tc_var, rate_scale)
        assert abs(g - ref) <= 1e-5 * ref


def test_generator_calibration():
    """Counts, marks and rescaled inter-spike intervals of the spike
    generator: unit-window Fano factor in [0.9, 1.1] at >= 1e4 expected
    spikes, mark moments within 3 standard errors of the conditional
    Gaussian, and time-rescaling KS p-value above 0.01."""
    static = StateModel.scalar(0.0, 0.0, mean0=0.3, var0=0.0)
    enc = EncoderParams.scalar(0.0, 1.0, 0.2, 10.0)
    horizon = 2600.0
    rate = total_rate(enc, np.array([0.3]))
    assert rate * horizon >= 1e4
    path = simulate_path(static, horizon, 1e-3, path_seed(23, 0))
    train = generate_spikes(enc, path, spike_seed(23, 0, 0))

    counts, _ = np.histogram(train.times, bins=np.arange(0.0, horizon + 0.5))
    fano = counts.var(ddof=1) / counts.mean()
    assert 0.9 <= fano <= 1.1, f"unit-window Fano factor {fano:.4f}"

    # theta | x ~ N(x * pop/(pop+tc), pop*tc/(pop+tc)) at x = 0.3
    marks = train.marks[:, 0]
    n = marks.size
    mark_mean, mark_var = 0.25, 1.0 / 6.0
    se_mean = marks.std(ddof=1) / np.sqrt(n)
    se_var = marks.var(ddof=1) * np.sqrt(2.0 / (n - 1))
    assert abs(marks.mean() - mark_mean) <= 3.0 * se_mean
    assert abs(marks.var(ddof=1) - mark_var) <= 3.0 * se_var

    moving = StateModel.scalar(-1.0, 0.5, mean0=0.0, var0=0.125)
    enc_ks = EncoderParams.scalar(0.0, 1.0, 0.2, 50.0)
    path = simulate_path(moving, 520.0, 1e-3, path_seed(29, 0))
    train = generate_spikes(enc_ks, path, spike_seed(29, 0, 0))
    rates = total_rate(enc_ks, path.states)
    compensator = np.concatenate([[0.0], np.cumsum(rates[:-1] * 1e-3)])
    idx = np.searchsorted(path.times, train.times, side="right") - 1
    rescaled = compensator[idx] + (train.times - path.times[idx]) * rates[idx]
    isis = np.diff(np.concatenate([[0.0], rescaled]))
    ks = stats.kstest(isis, "expon")
    assert ks.pvalue > 0.01, f"time-rescaling KS p={ks.pvalue:.4f}"


def test_extreme_parameter_limits():
    """Three parameter limits: a very wide population silences the expected
    rate; a very wide tuning curve makes observations carry no information;
    scaling population width with matched peak rate converges the full
    filter to the uniform-coding filter on shared spikes."""
    # (i) population variance 1e6: expected rate never exceeds 1e-2 * scale
    dyn = StateModel.scalar(-1.0, 0.5, mean0=0.0, var0=0.125)
    feed_enc = EncoderParams.scalar(0.0, 1.0, 0.2, 30.0)
    path = simulate_path(dyn, 5.0, 1e-3, path_seed(37, 0))
    train = generate_spikes(feed_enc, path, spike_seed(37, 0, 0))
    wide_pop = EncoderParams.scalar(0.0, 1e6, 0.2, 20.0)
    result = run_filter(dyn, wide_pop, train, GaussianBelief.scalar(0.0, 1.0),
                        1e-3, mode=FilterMode.FULL_ADF)
    assert result.diagnostics.g_trace.max() < 1e-2 * 20.0

    # (ii) tuning-curve variance 1e6: trajectory reduces to the prior flow
    model = StateModel.scalar(-1.0, 0.5)
    wide_tc = EncoderParams.scalar(0.0, 1.0, 1e6, 10.0)
    init = GaussianBelief.scalar(0.7, 0.3)
    empty = SpikeTrain.empty(1, 10.0)
    result = run_filter(model, wide_tc, empty, init, 1e-3,
                        mode=FilterMode.FULL_ADF)
    exact_mean = 0.7 * np.exp(-result.times)
    exact_var = (0.3 - 0.125) * np.exp(-2.0 * result.times) + 0.125
    assert np.max(np.abs(result.means[:, 0] - exact_mean)) < 1e-3
    assert np.max(np.abs(result.covs[:, 0, 0] - exact_var)) < 1e-3
    for mean, var in ((0.7, 0.3), (0.0, 1.25), (-1.2, 2.0)):
        for offset in (0.5, -3.0, 300.0):
            post = apply_spike(wide_tc, GaussianBelief.scalar(mean, var),
                               mean + offset)
            assert abs(post.mean[0] - mean) / abs(offset) < 1e-5
            assert 0.0 <= 1.0 - post.cov[0, 0] / var < 1e-5

    # (iii) population variance K with rate scale ~ sqrt(K): the full filter
    # approaches the uniform-coding filter run on the same spikes
    dyn = StateModel.scalar(-0.1, 0.5, mean0=0.0, var0=0.0)
    uniform_enc = EncoderParams.scalar_uniform(0.2, 10.0)
    path = simulate_path(dyn, 5.0, 1e-3, path_seed(31, 0))
    shared = generate_spikes(uniform_enc, path, spike_seed(31, 0, 0))
    init = GaussianBelief.scalar(0.0, 1.0)
    uniform = run_filter(dyn, uniform_enc, shared, init, 1e-3,
                         mode=FilterMode.UNIFORM_CODING)
    gaps = []
    for k in (1e2, 1e4, 1e6):
        enc_k = EncoderParams.scalar(0.0, k, 0.2, 10.0 * np.sqrt(k))
        full = run_filter(dyn, enc_k, shared, init, 1e-3,
                          mode=FilterMode.FULL_ADF)
        gaps.append(max(np.max(np.abs(full.means - uniform.means)),
                        np.max(np.abs(full.covs - uniform.covs))))
    assert gaps[0] > gaps[1] > gaps[2], f"gaps not decreasing: {gaps}"
    assert gaps[2] < 1e-2, f"limit gap {gaps[2]:.3e}"


def test_particle_filter_oracle():
    """100 paired trials against a 1e4-particle filter on the same spikes:
    the mean absolute mean gap stays below 0.1 particle standard deviations
    and the mean relative variance gap below 0.15 over t in [1, 10],
    within a ten-minute budget."""
    start = time.monotonic()
    model = StateModel.scalar(-0.1, 0.5, mean0=0.0, var0=0.0)
    enc = EncoderParams.scalar(0.0, 0.5, 0.1, 50.0)
    cfg = ExperimentConfig(model=model, encoder=enc, horizon=10.0, dt=1e-3,
                           window=(1.0, 10.0), trials=100, master_seed=21,
                           filter_init=GaussianBelief.scalar(0.0, 1.25))
    report = validate_oracle(cfg, particle_count=10_000)
    elapsed = time.monotonic() - start
    assert not report.failed.any()
    assert report.mean_gap_ratio < 0.1, f"mean gap ratio {report.mean_gap_ratio:.4f}"
    assert report.mean_rel_var_gap < 0.15, \
        f"mean relative variance gap {report.mean_rel_var_gap:.4f}"
    assert elapsed < 600.0, f"oracle run took {elapsed:.0f}s"


def test_full_filter_beats_uniform_coding():
    """Static state at 0.5, 1000 paired trials: the full filter's window
    integrated squared error beats uniform coding by more than two combined
    standard errors at population variance 0.5, and the two are within one
    combined standard error at population variance 1e4."""
    model = StateModel.scalar(0.0, 0.0, mean0=0.5, var0=0.0)
    enc = EncoderParams.scalar(0.0, 0.5, 0.1, 10.0)
    cfg = ExperimentConfig(model=model, encoder=enc, horizon=10.0, dt=1e-3,
                           window=(5.0, 10.0), trials=1000, master_seed=17,
                           filter_init=GaussianBelief.scalar(0.0, 1.0))
    report = compare_uniform(cfg, [0.5, 1e4])
    assert report.excluded.sum() == 0
    assert report.diff_mean[0] < -2.0 * report.combined_se[0], \
        (f"advantage {report.diff_mean[0]:+.4f} vs "
         f"2*SE {2 * report.combined_se[0]:.4f}")
    assert abs(report.diff_mean[1]) < report.combined_se[1], \
        (f"wide-population gap {report.diff_mean[1]:+.4f} vs "
         f"SE {report.combined_se[1]:.4f}")


def test_variance_tracks_mse():
    """1000 trials of the slow mean-reverting process started from a known
    state with the stationary prior on the filter: the window ratio of mean
    squared error to mean posterior variance over [5, 10] lies in
    [0.8, 1.2], and the stationary prior variance is exactly 1.25."""
    model = StateModel.scalar(-0.1, 0.5, mean0=0.0, var0=0.0)
    assert steady_state_prior(StateModel.scalar(-0.1, 0.5)).variance == 1.25
    enc = EncoderParams.scalar(0.0, 0.1, 0.01, 10.0)
    cfg = ExperimentConfig(model=model, encoder=enc, horizon=10.0, dt=1e-3,
                           window=(5.0, 10.0), trials=1000, master_seed=11,
                           filter_init=GaussianBelief.scalar(0.0, 1.25))
    report = variance_vs_mse(cfg)
    assert report.excluded == 0
    assert report.stationary_var == 1.25
    assert 0.8 <= report.window_ratio <= 1.2, \
        f"window MSE/variance ratio {report.window_ratio:.4f}"


def test_center_sweep_ordering():
    """Center sweep at four rate scales, 1000 trials per cell: at rate
    scale 50 the optimal center is strictly between zero and the
    silence-optimal center, and the optimal center is non-increasing in the
    rate scale up to one grid cell of Monte Carlo jitter."""
    model = StateModel.scalar(-1.0, 0.5, mean0=0.0, var0=0.125)
    enc = EncoderParams.scalar(0.0, 0.1, 0.01, 10.0)
    cfg = ExperimentConfig(model=model, encoder=enc, horizon=10.0, dt=1e-3,
                           window=(5.0, 10.0), trials=1000, master_seed=303)
    centers = [round(0.05 * k, 10) for k in range(21)]
    rates = [10.0, 20.0, 50.0, 100.0]
    report = sweep_center(cfg, centers, rate_scales=rates)
    c_50 = report.optimal_center[rates.index(50.0)]
    m_50 = report.silence_center[rates.index(50.0)]
    assert 0.0 < c_50 < m_50, f"c*={c_50} silence center={m_50}"
    cell = centers[1] - centers[0]
    steps = np.diff(report.optimal_center)
    assert np.all(steps <= cell + 1e-12), \
        f"optimal centers not non-increasing: {report.optimal_center}"


def test_population_sweep_optima():
    """Joint (center, population variance) sweeps for a static state,
    100 trials per cell: a narrow prior puts the optimum beyond one prior
    standard deviation with a small population variance; a wide prior puts
    the optimal population variance within a factor of three of the prior
    variance, with estimation breakdown (RMSE above the prior scale) only
    at small population variances."""
    enc = EncoderParams.scalar(0.0, 0.1, 1.0, 10.0)

    narrow = StateModel.scalar(0.0, 0.0, mean0=0.0, var0=0.1)
    cfg = ExperimentConfig(model=narrow, encoder=enc, horizon=10.0, dt=1e-3,
                           window=(5.0, 10.0), trials=100, master_seed=404)
    report = sweep_population(
        cfg, centers=[0.0, 0.15, 0.3, 0.45, 0.6, 0.8, 1.0, 1.25, 1.6, 2.0, 2.5],
        pop_vars=[0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0])
    assert abs(report.optimal_center) > np.sqrt(0.1), \
        f"narrow-prior optimal center {report.optimal_center}"
    assert report.optimal_pop_var <= 0.1, \
        f"narrow-prior optimal population variance {report.optimal_pop_var}"

    wide = StateModel.scalar(0.0, 0.0, mean0=0.0, var0=10.0)
    cfg = ExperimentConfig(model=wide, encoder=enc, horizon=10.0, dt=1e-3,
                           window=(5.0, 10.0), trials=100, master_seed=404)
    pop_vars = [0.3, 1.0, 3.0, 10.0, 30.0, 100.0]
    report = sweep_population(cfg, centers=[0.0, 1.0, 2.0, 3.0, 4.5, 6.0],
                              pop_vars=pop_vars)
    assert 10.0 / 3.0 <= report.optimal_pop_var <= 30.0, \
        f"wide-prior optimal population variance {report.optimal_pop_var}"
    above_prior = report.cells.rmse_ratio > 1.0
    assert above_prior.any(), "no cell exceeded the prior scale"
    worst_pop = max(pop_vars[j] for _, j in np.argwhere(above_prior))
    assert worst_pop <= 1.0, \
        f"RMSE exceeded the prior scale at population variance {worst_pop}"


CLI_BASE = (
    "model.a = -1.0\n"
    "model.d = 0.5\n"
    "model.init = steady\n"
    "encoder.center = 0.0\n"
    "encoder.pop_var = 0.5\n"
    "encoder.tc_var = 0.1\n"
    "encoder.rate_scale = 20.0\n"
    "run.horizon = 1.0\n"
    "run.dt = 0.01\n"
    "run.trials = 3\n"
    "run.seed = 7\n"
    "run.window = [0.5, 1.0]\n")

CLI_RUNS = [
    ("simulate", CLI_BASE),
    ("spikes", CLI_BASE),
    ("filter", CLI_BASE + "filter.modes = full_adf, uniform_coding\n"),
    ("compare-uniform", CLI_BASE + "sweep.pop_vars = [0.5, 100.0]\n"),
    ("sweep-center", CLI_BASE + ("sweep.centers = [0.0, 0.3]\n"
                                 "sweep.rate_scales = [10.0, 20.0]\n")),
    ("sweep-pop", ("model.a = 0.0\nmodel.d = 0.0\n"
                   "model.mean0 = 0.0\nmodel.var0 = 0.5\n"
                   "encoder.center = 0.0\nencoder.pop_var = 0.5\n"
                   "encoder.tc_var = 0.1\nencoder.rate_scale = 20.0\n"
                   "run.horizon = 1.0\nrun.dt = 0.01\n"
                   "run.trials = 3\nrun.seed = 7\n"
                   "run.window = [0.5, 1.0]\n"
                   "sweep.centers = [0.0, 0.5]\n"
                   "sweep.pop_vars = [0.3, 1.0]\n")),
    ("variance-mse", CLI_BASE),
    ("validate-oracle", ("model.a = -0.1\nmodel.d = 0.5\n"
                         "model.mean0 = 0.0\nmodel.var0 = 0.0\n"
                         "encoder.center = 0.0\nencoder.pop_var = 0.5\n"
                         "encoder.tc_var = 0.1\nencoder.rate_scale = 20.0\n"
                         "run.horizon = 0.6\nrun.dt = 0.01\n"
                         "run.trials = 2\nrun.seed = 3\n"
                         "run.window = [0.2, 0.6]\n"
                         "filter.mean0 = 0.0\nfilter.var0 = 1.25\n"
                         "pf.particles = 300\n")),
]


def _tree_digests(root):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.iterdir())}


def test_cli_byte_determinism(tmp_path):
    """Every CLI subcommand, run twice with the same config and seed (the
    second time with two worker processes), writes byte-identical files."""
    for command, text in CLI_RUNS:
        cfg = tmp_path / f"{command}.cfg"
        cfg.write_text(text, encoding="utf-8")
        first = tmp_path / f"{command}-a"
        second = tmp_path / f"{command}-b"
        assert main([command, "--config", str(cfg), "--out", str(first)]) == 0
        assert main([command, "--config", str(cfg), "--out", str(second),
                     "--threads", "2"]) == 0
        assert _tree_digests(first) == _tree_digests(second), command
        manifest = json.loads((first / "manifest.json").read_text())
        assert manifest["command"] == command
