"""Monte Carlo experiment harness: paired trials, sweeps, reports.

Design rules shared by every experiment here:

  * Paired trials. Within a parameter cell, every filter variant consumes
    the identical (path, spike train) pair, so filter comparisons difference
    away path noise.
  * Keyed randomness. Trial i's path comes from the stream
    [master_seed, 1, i], its spike train from [master_seed, 2, i, cell],
    and particle runs from [master_seed, 3, i]. Results are therefore
    byte-reproducible regardless of execution order or worker count, and
    paths are shared across cells of a sweep (common random numbers).
  * Failures are data. A trial that raises (covariance blow-up, degenerate
    ensemble) is excluded from the cell's means and counted in
    `excluded`; nothing is retried with new randomness.

The sweep and comparison experiments run on a vectorized scalar engine
(`_filter_scalar_batch`) that advances all trials of a cell in lock step;
it is checked against the general `run_filter` in the test suite and hits
the same grid, split-step and jump conventions.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import (LinearDrift, StatePath, StateModel, simulate_path,
                       simulate_path_batch, steady_state_prior, time_grid)
from .encoding import EncoderParams, GaussianPopulation, SpikeTrain, generate_spikes
from .errors import PpfilterError
from .filtering import (FilterDiagnostics, FilterMode, FilterResult,
                        GaussianBelief, between_spike_derivative, run_filter)
from .particle import run_particle_filter

DEFAULT_DT = 1e-3

_PATH_STREAM = 1
_SPIKE_STREAM = 2
_PF_STREAM = 3


def path_seed(master_seed: int, trial: int) -> list[int]:
    return [int(master_seed), _PATH_STREAM, int(trial)]


def spike_seed(master_seed: int, trial: int, cell: int) -> list[int]:
    return [int(master_seed), _SPIKE_STREAM, int(trial), int(cell)]


def pf_seed(master_seed: int, trial: int) -> list[int]:
    return [int(master_seed), _PF_STREAM, int(trial)]


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared experiment settings.

    `window` is the [lo, hi) time interval over which squared errors are
    integrated and posterior variances time-averaged. Filters start from
    `filter_init` when given, otherwise from the model's initial
    distribution; a separate prior lets the true state start from a point
    mass while the decoder assumes a proper distribution.
    """

    model: StateModel
    encoder: EncoderParams
    horizon: float
    dt: float
    window: tuple[float, float]
    trials: int
    master_seed: int
    filter_init: GaussianBelief | None = None

    def __post_init__(self):
        lo, hi = self.window
        if not (0.0 <= lo < hi <= self.horizon):
            raise ValueError(f"window {self.window} must fit in [0, {self.horizon}]")
        if self.trials < 1:
            raise ValueError("need at least one trial")

    def effective_init(self) -> GaussianBelief:
        if self.filter_init is not None:
            return self.filter_init
        return GaussianBelief(self.model.initial_mean, self.model.initial_cov)


@dataclass(frozen=True)
class TrialRecord:
    """One trial's raw material and per-filter summaries.

    `results` maps a filter label ("full_adf", "uniform_coding",
    "nonlinear_adf" or "particle") to its trajectory; `integrated_se` and
    `window_mean_var` hold the window metrics for each label.
    """

    path: StatePath
    train: SpikeTrain
    results: dict[str, FilterResult]
    integrated_se: dict[str, float]
    window_mean_var: dict[str, float]
    spike_count: int


def window_node_mask(times: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    lo, hi = window
    return (times >= lo - 1e-12) & (times < hi - 1e-12)


def window_metrics(path_states: np.ndarray, result: FilterResult,
                   window: tuple[float, float]) -> tuple[float, float]:
    """Integrated squared error and time-averaged posterior variance.

    Left Riemann sums over grid nodes with lo <= t < hi: the squared error
    integrates ||x_t - mu_t||^2 dt and the variance averages trace(cov_t).
    """
    mask = window_node_mask(result.times, window)
    dt = float(result.times[1] - result.times[0])
    dev = path_states[mask] - result.means[mask]
    ise = float(np.sum(dev * dev) * dt)
    tr = np.trace(result.covs[mask], axis1=1, axis2=2)
    mean_var = float(np.sum(tr) * dt / (window[1] - window[0]))
    return ise, mean_var


def run_trial(config: ExperimentConfig, trial_index: int,
              modes: Sequence[FilterMode] = (FilterMode.FULL_ADF,),
              cell_index: int = 0, init: GaussianBelief | None = None,
              pf_count: int | None = None) -> TrialRecord:
    """Simulate one trial and filter it with the requested variants.

    Fully deterministic given (config, trial_index, cell_index): the path,
    spikes and any particle run are derived from the keyed streams in the
    module docstring.
    """
    model, enc = config.model, config.encoder
    path = simulate_path(model, config.horizon, config.dt,
                         path_seed(config.master_seed, trial_index))
    train = generate_spikes(enc, path, spike_seed(config.master_seed,
                                                  trial_index, cell_index))
    if init is None:
        init = config.effective_init()
    results: dict[str, FilterResult] = {}
    for mode in modes:
        results[mode.value] = run_filter(model, enc, train, init, config.dt, mode)
    if pf_count:
        results["particle"] = run_particle_filter(
            model, enc, train, init, config.dt, pf_count,
            pf_seed(config.master_seed, trial_index))
    ise, wvar = {}, {}
    for label, res in results.items():
        ise[label], wvar[label] = window_metrics(path.states, res, config.window)
    return TrialRecord(path=path, train=train, results=results,
                       integrated_se=ise, window_mean_var=wvar,
                       spike_count=len(train))


# ---------------------------------------------------------------------------
# Vectorized scalar engine
# ---------------------------------------------------------------------------


def _require_scalar(config: ExperimentConfig) -> tuple[float, float]:
    model = config.model
    if model.dim != 1 or not isinstance(model.drift, LinearDrift):
        raise ValueError("the batch engine needs a 1-D linear model")
    if model.control is not None:
        raise ValueError("the batch engine does not take control inputs")
    return float(model.drift.matrix[0, 0]), float(model.diffusion[0, 0])


def _scalar_encoder_coeffs(enc: EncoderParams) -> tuple[float, float, float, float]:
    if enc.mark_dim != 1 or enc.state_dim != 1 or enc.obs_matrix[0, 0] != 1.0:
        raise ValueError("the batch engine assumes a scalar encoder with H = 1")
    if not isinstance(enc.population, GaussianPopulation):
        raise ValueError("the batch engine needs a Gaussian population")
    return (float(enc.center[0]), float(enc.pop_cov[0, 0]),
            float(enc.tc_cov[0, 0]), enc.rate_scale)


@dataclass
class CellStats:
    """Per-trial summaries for one (cell, filter) batch run.

    Failed trials carry NaN summaries and True in `failed`; series output
    and accumulators, when requested, cover non-failed trials only.
    """

    integrated_se: np.ndarray   # (T,)
    window_mean_var: np.ndarray  # (T,)
    failed: np.ndarray          # (T,) bool
    spike_counts: np.ndarray    # (T,) int
    series_sums: dict[str, np.ndarray] | None = None
    series_count: int = 0
    means: np.ndarray | None = None  # (T, K+1) when collect_series
    vars: np.ndarray | None = None


def _filter_scalar_batch(a: float, d: float, center: float, pop_var: float,
                         tc_var: float, rate_scale: float, uniform_mode: bool,
                         times: np.ndarray, paths: np.ndarray,
                         trains: Sequence[SpikeTrain], init_mean: float,
                         init_var: float, window: tuple[float, float],
                         collect_series: bool = False,
                         accumulate: bool = False,
                         _active: np.ndarray | None = None) -> CellStats:
    """Advance every trial of a cell through the scalar moment equations.

    Mirrors `run_filter` exactly: explicit Euler on the grid, spikes split
    their step and are applied in time order, the step is retried with up
    to 2^6 substeps when the variance leaves (0, inf), and a trial that
    still fails is dropped (NaN summaries). With `accumulate`, per-node
    sums of squared error, posterior variance and their ratio are collected
    over the surviving trials; if any trial fails during an accumulating
    run the batch is rerun without the failed trials so the sums stay
    consistent.
    """
    d2 = d * d
    count, nodes = paths.shape
    steps = nodes - 1
    dt = float(times[1] - times[0])
    mu = np.full(count, float(init_mean))
    var = np.full(count, float(init_var))
    alive = np.ones(count, dtype=bool)
    if _active is not None:
        alive &= _active
    mu[~alive] = np.nan
    var[~alive] = np.nan

    def rhs(m, v):
        if uniform_mode:
            return a * m, 2.0 * a * v + d2
        s2 = v + tc_var + pop_var
        dev = m - center
        g = rate_scale * np.sqrt(tc_var / s2) * np.exp(-0.5 * dev * dev / s2)
        dmu = a * m + g * (v / s2) * dev
        dvar = 2.0 * a * v + d2 + g * (v * v / s2) * (1.0 - dev * dev / s2)
        return dmu, dvar

    def advance(idx, h):
        """One Euler step of length h (per-element) with halving retries."""
        if idx.size == 0:
            return
        m0, v0 = mu[idx], var[idx]
        dm, dv = rhs(m0, v0)
        m1, v1 = m0 + h * dm, v0 + h * dv
        bad = ~((v1 > 0.0) & np.isfinite(v1) & np.isfinite(m1))
        if np.any(bad):
            sub = np.nonzero(bad)[0]
            ms, vs = m0[sub], v0[sub]
            hs = h[sub] if np.ndim(h) else np.full(sub.size, h)
            unresolved = np.ones(sub.size, dtype=bool)
            for level in range(1, 7):
                parts = 2 ** level
                mm, vv = ms.copy(), vs.copy()
                ok = unresolved.copy()
                for _ in range(parts):
                    dm2, dv2 = rhs(mm, vv)
                    mm = mm + (hs / parts) * dm2
                    vv = vv + (hs / parts) * dv2
                    ok &= (vv > 0.0) & np.isfinite(vv) & np.isfinite(mm)
                fixed = ok & unresolved
                m1[sub[fixed]], v1[sub[fixed]] = mm[fixed], vv[fixed]
                unresolved &= ~ok
                if not unresolved.any():
                    break
            dead = sub[unresolved]
            alive[idx[dead]] = False
            m1[dead], v1[dead] = np.nan, np.nan
        mu[idx], var[idx] = m1, v1

    def jump(idx, theta):
        v = var[idx]
        gain = v / (v + tc_var)
        mu[idx] = mu[idx] + gain * (theta - mu[idx])
        var[idx] = v * tc_var / (v + tc_var)

    # Flatten spikes to (step, trial, time, mark) sorted by step then by
    # trial (times are already increasing within a trial).
    spike_counts = np.array([len(tr) for tr in trains])
    flat_t = np.concatenate([tr.times for tr in trains]) if trains else np.empty(0)
    flat_mark = (np.concatenate([tr.marks[:, 0] for tr in trains])
                 if trains else np.empty(0))
    flat_trial = np.repeat(np.arange(count), spike_counts)
    flat_step = np.maximum(np.searchsorted(times, flat_t, side="left") - 1, 0)
    order = np.argsort(flat_step, kind="stable")
    flat_t, flat_mark = flat_t[order], flat_mark[order]
    flat_trial, flat_step = flat_trial[order], flat_step[order]
    step_start = np.searchsorted(flat_step, np.arange(steps), side="left")
    step_end = np.searchsorted(flat_step, np.arange(steps), side="right")

    win_mask = window_node_mask(times, window)
    acc_ise = np.zeros(count)
    acc_var = np.zeros(count)
    sums = None
    if accumulate:
        sums = {key: np.zeros(nodes) for key in
                ("se", "se2", "var", "var2", "ratio", "ratio2")}

    def record(node):
        se = (mu - paths[:, node]) ** 2
        if win_mask[node]:
            live = alive
            acc_ise[live] += se[live] * dt
            acc_var[live] += var[live] * dt
        if accumulate:
            ratio = se / var
            sums["se"][node] += np.sum(se[alive])
            sums["se2"][node] += np.sum(se[alive] ** 2)
            sums["var"][node] += np.sum(var[alive])
            sums["var2"][node] += np.sum(var[alive] ** 2)
            sums["ratio"][node] += np.sum(ratio[alive])
            sums["ratio2"][node] += np.sum(ratio[alive] ** 2)
        if collect_series:
            series_mu[:, node] = mu
            series_var[:, node] = var

    if collect_series:
        series_mu = np.empty((count, nodes))
        series_var = np.empty((count, nodes))
    scratch = np.zeros(count, dtype=bool)
    all_idx = np.arange(count)
    record(0)
    for k in range(steps):
        lo, hi = step_start[k], step_end[k]
        if hi > lo:
            tr_k = flat_trial[lo:hi]
            tm_k = np.minimum(flat_t[lo:hi], times[k + 1])
            mk_k = flat_mark[lo:hi]
            involved, first = np.unique(tr_k, return_index=True)
            ranks = np.arange(hi - lo) - first[np.searchsorted(involved, tr_k)]
            cursor = np.full(involved.size, times[k])
            for r in range(int(ranks.max()) + 1):
                sel = np.nonzero(ranks == r)[0]
                pos = np.searchsorted(involved, tr_k[sel])
                advance(tr_k[sel], np.maximum(tm_k[sel] - cursor[pos], 0.0))
                jump(tr_k[sel], mk_k[sel])
                cursor[pos] = tm_k[sel]
            advance(involved, np.maximum(times[k + 1] - cursor, 0.0))
            scratch[:] = False
            scratch[involved] = True
            advance(all_idx[alive & ~scratch], dt)
        else:
            advance(all_idx[alive], dt)
        record(k + 1)

    failed = ~alive
    if _active is not None:
        failed &= _active
    if accumulate and np.any(failed):
        # Keep the per-node sums consistent: rerun without the failed trials.
        keep = alive.copy()
        rerun = _filter_scalar_batch(
            a, d, center, pop_var, tc_var, rate_scale, uniform_mode, times,
            paths, trains, init_mean, init_var, window,
            collect_series=collect_series, accumulate=True, _active=keep)
        rerun.failed = failed | rerun.failed
        return rerun

    acc_ise[failed] = np.nan
    acc_var[failed] = np.nan
    if _active is not None:
        acc_ise[~_active] = np.nan
        acc_var[~_active] = np.nan
    return CellStats(
        integrated_se=acc_ise,
        window_mean_var=acc_var / (window[1] - window[0]),
        failed=failed,
        spike_counts=spike_counts,
        series_sums=sums,
        series_count=int(np.sum(alive)),
        means=series_mu if collect_series else None,
        vars=series_var if collect_series else None,
    )


def _cell_data(config: ExperimentConfig, enc: EncoderParams, cell_index: int):
    """Paths (shared across cells) and this cell's spike trains."""
    times = time_grid(config.horizon, config.dt)
    seeds = [path_seed(config.master_seed, i) for i in range(config.trials)]
    paths = simulate_path_batch(config.model, config.horizon, config.dt,
                                seeds)[:, :, 0]
    trains = [
        generate_spikes(enc, StatePath(times, paths[i][:, None]),
                        spike_seed(config.master_seed, i, cell_index))
        for i in range(config.trials)
    ]
    return times, paths, trains


def _run_scalar_cell(config: ExperimentConfig, enc: EncoderParams,
                     cell_index: int, uniform_too: bool = False,
                     accumulate: bool = False) -> dict[str, CellStats]:
    """Run FULL_ADF (and optionally UNIFORM_CODING) on one cell's data."""
    a, d = _require_scalar(config)
    center, pop_var, tc_var, rate = _scalar_encoder_coeffs(enc)
    times, paths, trains = _cell_data(config, enc, cell_index)
    init = config.effective_init()
    if init.dim != 1:
        raise PpfilterError("scalar experiments need a 1-D filter prior")
    init_mean = float(init.mean[0])
    init_var = init.variance
    if init_var <= 0.0:
        raise PpfilterError(
            "the filter prior must have positive variance; set filter_init "
            "when the model starts from a point mass")
    out = {
        FilterMode.FULL_ADF.value: _filter_scalar_batch(
            a, d, center, pop_var, tc_var, rate, False, times, paths, trains,
            init_mean, init_var, config.window, accumulate=accumulate)
    }
    if uniform_too:
        out[FilterMode.UNIFORM_CODING.value] = _filter_scalar_batch(
            a, d, center, pop_var, tc_var, rate, True, times, paths, trains,
            init_mean, init_var, config.window, accumulate=accumulate)
    return out


def _mean_se(values: np.ndarray) -> tuple[float, float, int]:
    """Mean, standard error and count over the non-NaN entries."""
    good = values[np.isfinite(values)]
    n = good.size
    if n == 0:
        return math.nan, math.nan, 0
    if n == 1:
        return float(good[0]), math.nan, 1
    return float(np.mean(good)), float(np.std(good, ddof=1) / math.sqrt(n)), n


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class UniformComparisonReport:
    """Integrated squared error of the full filter vs the uniform-coding
    filter across a population-variance grid (paired trials)."""

    pop_vars: np.ndarray
    adf_mean: np.ndarray
    adf_se: np.ndarray
    uniform_mean: np.ndarray
    uniform_se: np.ndarray
    diff_mean: np.ndarray
    diff_se: np.ndarray
    combined_se: np.ndarray
    excluded: np.ndarray
    trials: int

    def table(self):
        header = ["pop_var", "adf_mean_ise", "adf_se", "uniform_mean_ise",
                  "uniform_se", "diff_mean", "diff_se", "combined_se",
                  "excluded"]
        rows = [
            [self.pop_vars[i], self.adf_mean[i], self.adf_se[i],
             self.uniform_mean[i], self.uniform_se[i], self.diff_mean[i],
             self.diff_se[i], self.combined_se[i], int(self.excluded[i])]
            for i in range(self.pop_vars.size)
        ]
        return header, rows


def _uniform_compare_cell(args):
    config, pop_var, cell_index = args
    enc = dataclasses.replace(config.encoder, pop_cov=[[float(pop_var)]])
    stats = _run_scalar_cell(config, enc, cell_index, uniform_too=True)
    return {label: (s.integrated_se, s.failed)
            for label, s in stats.items()}


def _map_jobs(fn, payloads, threads: int):
    if threads <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, payloads))


def compare_uniform(config: ExperimentConfig, pop_vars: Sequence[float],
                    threads: int = 1) -> UniformComparisonReport:
    """Paired comparison of FULL_ADF against UNIFORM_CODING.

    For each population variance on the grid, both filters consume the same
    spike trains; the report carries per-filter means and standard errors of
    the window-integrated squared error, the paired difference, and the
    combined (quadrature-summed) standard error.
    """
    pop_vars = np.asarray(list(pop_vars), dtype=float)
    payloads = [(config, float(v), i) for i, v in enumerate(pop_vars)]
    results = _map_jobs(_uniform_compare_cell, payloads, threads)
    cols = {key: np.empty(pop_vars.size) for key in
            ("am", "ase", "um", "use", "dm", "dse", "cse")}
    excluded = np.zeros(pop_vars.size, dtype=int)
    for i, res in enumerate(results):
        adf_ise, adf_failed = res[FilterMode.FULL_ADF.value]
        uni_ise, uni_failed = res[FilterMode.UNIFORM_CODING.value]
        both = np.isfinite(adf_ise) & np.isfinite(uni_ise)
        excluded[i] = int(np.sum(~both))
        cols["am"][i], cols["ase"][i], _ = _mean_se(np.where(both, adf_ise, np.nan))
        cols["um"][i], cols["use"][i], _ = _mean_se(np.where(both, uni_ise, np.nan))
        cols["dm"][i], cols["dse"][i], _ = _mean_se(
            np.where(both, adf_ise - uni_ise, np.nan))
        cols["cse"][i] = math.hypot(cols["ase"][i], cols["use"][i])
    return UniformComparisonReport(
        pop_vars=pop_vars, adf_mean=cols["am"], adf_se=cols["ase"],
        uniform_mean=cols["um"], uniform_se=cols["use"], diff_mean=cols["dm"],
        diff_se=cols["dse"], combined_se=cols["cse"], excluded=excluded,
        trials=config.trials)


@dataclass
class SweepCells:
    """Rectangular sweep grid of window metrics.

    axis1/axis2 are the grid vectors; every 2-D array is indexed
    [i_axis1, i_axis2]. `prior_std` scales the ratio columns.
    """

    axis_names: tuple[str, str]
    axis1: np.ndarray
    axis2: np.ndarray
    mean_var: np.ndarray
    se_var: np.ndarray
    mean_wse: np.ndarray   # window-mean squared error
    se_wse: np.ndarray
    excluded: np.ndarray
    prior_std: float
    trials: int

    @property
    def std_ratio(self) -> np.ndarray:
        return np.sqrt(self.mean_var) / self.prior_std

    @property
    def rmse_ratio(self) -> np.ndarray:
        return np.sqrt(self.mean_wse) / self.prior_std

    def table(self):
        header = [self.axis_names[0], self.axis_names[1], "mean_post_var",
                  "se_post_var", "std_ratio", "mean_wse", "se_wse",
                  "rmse_ratio", "excluded"]
        rows = []
        std_ratio, rmse_ratio = self.std_ratio, self.rmse_ratio
        for i, v1 in enumerate(self.axis1):
            for j, v2 in enumerate(self.axis2):
                rows.append([v1, v2, self.mean_var[i, j], self.se_var[i, j],
                             std_ratio[i, j], self.mean_wse[i, j],
                             self.se_wse[i, j], rmse_ratio[i, j],
                             int(self.excluded[i, j])])
        return header, rows


def _sweep_cell(args):
    config, center, pop_var, tc_var, rate, cell_index = args
    enc = config.encoder
    enc = dataclasses.replace(
        enc, center=[float(center)], pop_cov=[[float(pop_var)]],
        tc_cov=[[float(tc_var)]], rate_scale=float(rate))
    stats = _run_scalar_cell(config, enc, cell_index)[FilterMode.FULL_ADF.value]
    window_len = config.window[1] - config.window[0]
    return (stats.window_mean_var, stats.integrated_se / window_len,
            int(np.sum(stats.failed)))


def _collect_sweep(config: ExperimentConfig, axis_names, axis1, axis2,
                   cell_params, prior_std: float, threads: int) -> SweepCells:
    shape = (len(axis1), len(axis2))
    results = _map_jobs(_sweep_cell, cell_params, threads)
    mean_var = np.empty(shape)
    se_var = np.empty(shape)
    mean_wse = np.empty(shape)
    se_wse = np.empty(shape)
    excluded = np.empty(shape, dtype=int)
    for flat, (wvar, wse, n_failed) in enumerate(results):
        i, j = divmod(flat, shape[1])
        mean_var[i, j], se_var[i, j], _ = _mean_se(wvar)
        mean_wse[i, j], se_wse[i, j], _ = _mean_se(wse)
        excluded[i, j] = n_failed
    return SweepCells(
        axis_names=axis_names, axis1=np.asarray(axis1, dtype=float),
        axis2=np.asarray(axis2, dtype=float), mean_var=mean_var,
        se_var=se_var, mean_wse=mean_wse, se_wse=se_wse, excluded=excluded,
        prior_std=prior_std, trials=config.trials)


def silence_variance_rate(config: ExperimentConfig, enc: EncoderParams,
                          post_var: float) -> float:
    """d(var)/dt of the no-spike moment ODE at mean = 0, variance = post_var."""
    deriv = between_spike_derivative(
        config.model, enc, GaussianBelief.scalar(0.0, post_var),
        FilterMode.FULL_ADF)
    return float(deriv.dcov[0, 0])


@dataclass
class CenterSweepReport:
    """Population-center sweep: window metrics per (axis value, center).

    For every value of the swept axis (rate scale or tuning-curve variance)
    the argmin table records the center minimizing the mean posterior
    variance, next to the silence-optimal center: the center minimizing the
    no-spike variance derivative at mean 0, evaluated at each cell's own
    measured posterior variance.
    """

    cells: SweepCells
    optimal_center: np.ndarray
    silence_center: np.ndarray

    def argmin_table(self):
        header = [self.cells.axis_names[0], "optimal_center", "silence_center"]
        rows = [[self.cells.axis1[i], self.optimal_center[i],
                 self.silence_center[i]]
                for i in range(self.cells.axis1.size)]
        return header, rows


def sweep_center(config: ExperimentConfig, centers: Sequence[float],
                 rate_scales: Sequence[float] | None = None,
                 tc_vars: Sequence[float] | None = None,
                 threads: int = 1) -> CenterSweepReport:
    """Sweep the population center against one encoder axis.

    Exactly one of `rate_scales` / `tc_vars` must be given; the other
    encoder parameters come from `config.encoder`. The prior scale for the
    ratio columns is the stationary standard deviation of the state model.
    """
    if (rate_scales is None) == (tc_vars is None):
        raise ValueError("sweep exactly one of rate_scales or tc_vars")
    centers = [float(c) for c in centers]
    _, base_pop, base_tc, base_rate = _scalar_encoder_coeffs(config.encoder)
    if rate_scales is not None:
        axis1 = [float(r) for r in rate_scales]
        params = [(config, c, base_pop, base_tc, r, idx)
                  for idx, (r, c) in enumerate(
                      (r, c) for r in axis1 for c in centers)]
        axis_names = ("rate_scale", "center")
    else:
        axis1 = [float(v) for v in tc_vars]
        params = [(config, c, base_pop, v, base_rate, idx)
                  for idx, (v, c) in enumerate(
                      (v, c) for v in axis1 for c in centers)]
        axis_names = ("tc_var", "center")
    prior_std = math.sqrt(steady_state_prior(config.model).variance)
    cells = _collect_sweep(config, axis_names, axis1, centers, params,
                           prior_std, threads)

    optimal = np.empty(len(axis1))
    silence = np.empty(len(axis1))
    for i, v1 in enumerate(axis1):
        row_var = cells.mean_var[i]
        optimal[i] = centers[int(np.nanargmin(row_var))]
        rates = np.empty(len(centers))
        for j, c in enumerate(centers):
            enc = dataclasses.replace(
                config.encoder, center=[c], pop_cov=[[base_pop]],
                tc_cov=[[base_tc if rate_scales is not None else v1]],
                rate_scale=(v1 if rate_scales is not None else base_rate))
            post_var = row_var[j]
            rates[j] = (silence_variance_rate(config, enc, post_var)
                        if np.isfinite(post_var) else np.inf)
        silence[i] = centers[int(np.argmin(rates))]
    return CenterSweepReport(cells=cells, optimal_center=optimal,
                             silence_center=silence)


@dataclass
class PopulationSweepReport:
    """Center x population-variance sweep for a static state.

    The argmin is taken over the posterior-std ratio map; `breakdown` flags
    cells whose RMSE exceeds the prior scale by more than two standard
    errors (estimation worse than not filtering at all).
    """

    cells: SweepCells
    optimal_center: float
    optimal_pop_var: float
    breakdown: np.ndarray  # bool, same shape as the grid

    def argmin_table(self):
        header = ["optimal_center", "optimal_pop_var", "breakdown_cells"]
        return header, [[self.optimal_center, self.optimal_pop_var,
                         int(np.sum(self.breakdown))]]

    def cells_table(self):
        header, rows = self.cells.table()
        header = header + ["breakdown"]
        flat = self.breakdown.reshape(-1)
        return header, [row + [int(flat[i])] for i, row in enumerate(rows)]


def sweep_population(config: ExperimentConfig, centers: Sequence[float],
                     pop_vars: Sequence[float],
                     threads: int = 1) -> PopulationSweepReport:
    """Sweep (center, population variance) for a static scalar state.

    The model must be static (zero drift and diffusion); the prior scale is
    the initial standard deviation, which is what the state is drawn from.
    """
    a, d = _require_scalar(config)
    if a != 0.0 or d != 0.0:
        raise ValueError("population sweep expects a static model (a = d = 0)")
    prior_std = math.sqrt(float(config.model.initial_cov[0, 0]))
    centers = [float(c) for c in centers]
    pop_vars = [float(v) for v in pop_vars]
    _, _, base_tc, base_rate = _scalar_encoder_coeffs(config.encoder)
    params = [(config, c, v, base_tc, base_rate, idx)
              for idx, (c, v) in enumerate(
                  (c, v) for c in centers for v in pop_vars)]
    cells = _collect_sweep(config, ("center", "pop_var"), centers, pop_vars,
                           params, prior_std, threads)
    ratio = cells.std_ratio
    flat = int(np.nanargmin(ratio))
    i, j = divmod(flat, len(pop_vars))
    rmse_gap = cells.rmse_ratio - 1.0
    rmse_se = cells.se_wse / np.maximum(
        2.0 * np.sqrt(cells.mean_wse) * prior_std, 1e-300)
    breakdown = rmse_gap > 2.0 * rmse_se
    return PopulationSweepReport(cells=cells, optimal_center=centers[i],
                                 optimal_pop_var=pop_vars[j],
                                 breakdown=breakdown)


@dataclass
class VarianceMseReport:
    """Mean squared error against mean posterior variance over time.

    `ratio_of_means[k]` is mse[k] / mean_var[k]; `window_ratio` is the same
    ratio built from window-averaged numerator and denominator, the
    steady-state figure of merit.
    """

    times: np.ndarray
    mse: np.ndarray
    mse_se: np.ndarray
    mean_var: np.ndarray
    var_se: np.ndarray
    mean_ratio: np.ndarray
    ratio_se: np.ndarray
    window_ratio: float
    stationary_var: float
    trials_used: int
    excluded: int

    @property
    def ratio_of_means(self) -> np.ndarray:
        return self.mse / self.mean_var

    def table(self, stride: int = 1):
        header = ["t", "mse", "mse_se", "mean_post_var", "post_var_se",
                  "ratio_of_means", "mean_ratio", "mean_ratio_se"]
        rom = self.ratio_of_means
        rows = [
            [self.times[k], self.mse[k], self.mse_se[k], self.mean_var[k],
             self.var_se[k], rom[k], self.mean_ratio[k], self.ratio_se[k]]
            for k in range(0, self.times.size, max(int(stride), 1))
        ]
        return header, rows


def variance_vs_mse(config: ExperimentConfig) -> VarianceMseReport:
    """Compare the filter's posterior variance with its squared error.

    Runs FULL_ADF on `config.trials` paired trials and aggregates, at every
    grid node, the squared error (mu - x)^2 and posterior variance across
    trials, plus the per-trial ratio. The window summary divides the
    window-averaged MSE by the window-averaged posterior variance.
    """
    stats = _run_scalar_cell(config, config.encoder, 0,
                             accumulate=True)[FilterMode.FULL_ADF.value]
    sums = stats.series_sums
    n = stats.series_count
    if n < 2:
        raise PpfilterError("too few surviving trials to aggregate")
    times = time_grid(config.horizon, config.dt)

    def mean_and_se(total, total_sq):
        mean = total / n
        sample_var = np.maximum(total_sq / n - mean * mean, 0.0) * n / (n - 1)
        return mean, np.sqrt(sample_var / n)

    mse, mse_se = mean_and_se(sums["se"], sums["se2"])
    mvar, var_se = mean_and_se(sums["var"], sums["var2"])
    mratio, ratio_se = mean_and_se(sums["ratio"], sums["ratio2"])
    mask = window_node_mask(times, config.window)
    window_ratio = float(np.mean(mse[mask]) / np.mean(mvar[mask]))
    stationary = steady_state_prior(config.model).variance
    return VarianceMseReport(
        times=times, mse=mse, mse_se=mse_se, mean_var=mvar, var_se=var_se,
        mean_ratio=mratio, ratio_se=ratio_se, window_ratio=window_ratio,
        stationary_var=float(stationary), trials_used=n,
        excluded=int(np.sum(stats.failed)))


@dataclass
class OracleComparisonReport:
    """Closed-form filter against the particle oracle, paired per trial.

    Gap columns average |mu_adf - mu_pf| over the window's grid nodes; the
    variance column averages |var_adf - var_pf| / var_pf. `mean_gap_ratio`
    is the mean absolute mean-gap divided by the mean particle posterior
    standard deviation, the headline agreement number.
    """

    trials: np.ndarray
    mean_abs_gap: np.ndarray
    mean_pf_std: np.ndarray
    rel_var_gap: np.ndarray
    spike_counts: np.ndarray
    failed: np.ndarray
    particle_count: int
    mean_gap_ratio: float
    mean_rel_var_gap: float
    sample_adf: FilterResult | None
    sample_pf: FilterResult | None

    def table(self):
        header = ["trial", "spikes", "mean_abs_mean_gap", "mean_pf_std",
                  "mean_rel_var_gap", "failed"]
        rows = [[int(self.trials[i]), int(self.spike_counts[i]),
                 self.mean_abs_gap[i], self.mean_pf_std[i],
                 self.rel_var_gap[i], int(self.failed[i])]
                for i in range(self.trials.size)]
        return header, rows

    def summary_table(self):
        header = ["mean_gap_ratio", "mean_rel_var_gap", "particle_count",
                  "trials", "failures"]
        return header, [[self.mean_gap_ratio, self.mean_rel_var_gap,
                         self.particle_count, int(self.trials.size),
                         int(np.sum(self.failed))]]


def _oracle_pf_trial(args):
    """Particle side of one oracle trial: (means, vars, failed)."""
    model, enc, train, init, dt, particle_count, seed = args
    try:
        pf = run_particle_filter(model, enc, train, init, dt, particle_count,
                                 seed)
        return pf.means[:, 0], pf.covs[:, 0, 0], False
    except PpfilterError:
        return None, None, True


def _series_result(times: np.ndarray, means: np.ndarray,
                   vars_: np.ndarray, jump_count: int) -> FilterResult:
    diag = FilterDiagnostics(g_trace=np.zeros(times.size),
                             min_eig_trace=np.zeros(times.size),
                             jump_count=jump_count)
    return FilterResult(times=times, means=means[:, None],
                        covs=vars_[:, None, None], diagnostics=diag)


def validate_oracle(config: ExperimentConfig, particle_count: int,
                    threads: int = 1) -> OracleComparisonReport:
    """Run the paired closed-form vs particle comparison over all trials.

    Each trial shares its path and spike train between the two filters; the
    closed-form side runs as one vectorized batch, the particle side trial
    by trial. The first trial's full trajectories are kept for side-by-side
    serialization.
    """
    a, d = _require_scalar(config)
    center, pop_var, tc_var, rate = _scalar_encoder_coeffs(config.encoder)
    init = config.effective_init()
    if init.dim != 1 or init.variance <= 0.0:
        raise PpfilterError("the oracle comparison needs a proper scalar "
                            "filter prior")
    times, paths, trains = _cell_data(config, config.encoder, 0)
    adf = _filter_scalar_batch(
        a, d, center, pop_var, tc_var, rate, False, times, paths, trains,
        float(init.mean[0]), init.variance, config.window,
        collect_series=True)
    payloads = [
        (config.model, config.encoder, trains[t], init, config.dt,
         int(particle_count), pf_seed(config.master_seed, t))
        for t in range(config.trials)
    ]
    results = _map_jobs(_oracle_pf_trial, payloads, threads)

    mask = window_node_mask(times, config.window)
    gap = np.full(config.trials, math.nan)
    pf_std = np.full(config.trials, math.nan)
    var_gap = np.full(config.trials, math.nan)
    failed = adf.failed.copy()
    sample_adf = sample_pf = None
    for t, (pf_mu, pf_var, pf_failed) in enumerate(results):
        failed[t] |= pf_failed
        if failed[t]:
            continue
        mu_gap = np.abs(adf.means[t, mask] - pf_mu[mask])
        vp = pf_var[mask]
        gap[t] = float(np.mean(mu_gap))
        pf_std[t] = float(np.mean(np.sqrt(vp)))
        var_gap[t] = float(np.mean(np.abs(adf.vars[t, mask] - vp) / vp))
        if sample_adf is None:
            sample_adf = _series_result(times, adf.means[t], adf.vars[t],
                                        len(trains[t]))
            sample_pf = _series_result(times, pf_mu, pf_var, len(trains[t]))
    spikes = np.array([len(tr) for tr in trains])
    mean_gap, _, _ = _mean_se(gap)
    mean_std, _, _ = _mean_se(pf_std)
    mean_var_gap, _, _ = _mean_se(var_gap)
    return OracleComparisonReport(
        trials=np.arange(config.trials), mean_abs_gap=gap, mean_pf_std=pf_std,
        rel_var_gap=var_gap, spike_counts=spikes, failed=failed,
        particle_count=int(particle_count),
        mean_gap_ratio=mean_gap / mean_std,
        mean_rel_var_gap=mean_var_gap,
        sample_adf=sample_adf, sample_pf=sample_pf)
