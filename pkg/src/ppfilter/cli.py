"""Command-line entry points.

Every subcommand reads a flat key-value config (see `configfile`), applies
the --seed/--trials/--dt overrides, runs one experiment and writes CSV
reports plus a manifest.json into --out. The CLI drives scalar (1-D)
models, which is what the shipped experiments use; the library API handles
higher dimensions. Outputs are deterministic functions of (config, seed)
and do not depend on --threads.

Subcommands and their outputs:

    simulate         path.csv
    spikes           path.csv, spikes.csv
    filter           path.csv, spikes.csv, belief_<mode>.csv, trial.csv,
                     phase.csv
    compare-uniform  uniform_compare.csv
    sweep-center     center_sweep_cells.csv, center_sweep_argmin.csv
    sweep-pop        pop_sweep_cells.csv, pop_sweep_argmin.csv
    variance-mse     variance_mse.csv, variance_mse_summary.csv
    validate-oracle  oracle_trials.csv, oracle_summary.csv,
                     oracle_adf_belief.csv, oracle_pf_belief.csv
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .configfile import parse_config, take
from .dynamics import StateModel, simulate_path, steady_state_prior
from .encoding import EncoderParams, generate_spikes
from .errors import ConfigError, PpfilterError
from .experiments import (DEFAULT_DT, ExperimentConfig, compare_uniform,
                          path_seed, run_trial, spike_seed, sweep_center,
                          sweep_population, validate_oracle, variance_vs_mse)
from .filtering import FilterMode, between_spike_derivative
from .gaussian import GaussianBelief
from . import reports


def _build_model(cfg) -> StateModel:
    a = take(cfg, "model.a", float, 0.0)
    d = take(cfg, "model.d", float, 0.0)
    init = take(cfg, "model.init", str, None)
    if init == "steady":
        prior = steady_state_prior(StateModel.scalar(a, d))
        mean0, var0 = 0.0, prior.variance
    elif init is None:
        mean0 = take(cfg, "model.mean0", float, 0.0)
        var0 = take(cfg, "model.var0", float, 0.0)
    else:
        raise ConfigError(f"key 'model.init': unknown value '{init}'")
    return StateModel.scalar(a, d, mean0, var0)


def _build_encoder(cfg) -> EncoderParams:
    return EncoderParams.scalar(
        take(cfg, "encoder.center", float, 0.0),
        take(cfg, "encoder.pop_var", float, required=True),
        take(cfg, "encoder.tc_var", float, required=True),
        take(cfg, "encoder.rate_scale", float, required=True),
    )


def _build_experiment(cfg, args) -> ExperimentConfig:
    horizon = take(cfg, "run.horizon", float, 10.0)
    dt = args.dt if args.dt is not None else take(cfg, "run.dt", float, DEFAULT_DT)
    trials = (args.trials if args.trials is not None
              else take(cfg, "run.trials", int, 100))
    seed = (args.seed if args.seed is not None
            else take(cfg, "run.seed", int, 0))
    window = take(cfg, "run.window", list, None)
    if window is None:
        window = (horizon / 2.0, horizon)
    elif len(window) != 2:
        raise ConfigError("key 'run.window': expected [lo, hi]")
    model = _build_model(cfg)
    return ExperimentConfig(
        model=model, encoder=_build_encoder(cfg),
        horizon=horizon, dt=dt, window=(float(window[0]), float(window[1])),
        trials=trials, master_seed=int(seed),
        filter_init=_filter_init(cfg, model))


def _float_list(cfg, key, required: bool = False):
    values = take(cfg, key, list, None)
    if values is None:
        if required:
            raise ConfigError(f"key '{key}': required but missing")
        return None
    try:
        return [float(v) for v in values]
    except (TypeError, ValueError):
        raise ConfigError(f"key '{key}': expected a numeric list, got {values!r}")


def _filter_init(cfg, model: StateModel) -> GaussianBelief | None:
    """Decoder prior from filter.mean0/var0; None defers to the model."""
    mean0 = take(cfg, "filter.mean0", float, None)
    var0 = take(cfg, "filter.var0", float, None)
    if mean0 is None and var0 is None:
        return None
    if mean0 is None:
        mean0 = float(model.initial_mean[0])
    if var0 is None:
        var0 = float(model.initial_cov[0, 0])
    if var0 <= 0.0:
        raise ConfigError(
            "key 'filter.var0': the filter needs a positive initial variance")
    return GaussianBelief.scalar(mean0, var0)


def _settings(config: ExperimentConfig, **extra) -> dict:
    base = {
        "seed": config.master_seed,
        "trials": config.trials,
        "dt": config.dt,
        "horizon": config.horizon,
        "window": list(config.window),
    }
    base.update(extra)
    return base


def _finish(args, command: str, config_text: str, settings: dict,
            names: list[str]) -> None:
    reports.write_manifest(os.path.join(args.out, "manifest.json"),
                           command, config_text, settings)
    print(f"{command}: wrote {', '.join(names + ['manifest.json'])} to {args.out}")


def _cmd_simulate(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    trial = take(cfg, "trial.index", int, 0)
    path = simulate_path(config.model, config.horizon, config.dt,
                         path_seed(config.master_seed, trial))
    reports.write_path(os.path.join(args.out, "path.csv"), path.times, path.states)
    _finish(args, "simulate", config_text, _settings(config, trial=trial),
            ["path.csv"])


def _cmd_spikes(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    trial = take(cfg, "trial.index", int, 0)
    path = simulate_path(config.model, config.horizon, config.dt,
                         path_seed(config.master_seed, trial))
    train = generate_spikes(config.encoder, path,
                            spike_seed(config.master_seed, trial, 0))
    reports.write_path(os.path.join(args.out, "path.csv"), path.times, path.states)
    reports.write_spike_train(os.path.join(args.out, "spikes.csv"), train)
    _finish(args, "spikes", config_text,
            _settings(config, trial=trial, spike_count=len(train)),
            ["path.csv", "spikes.csv"])


def _phase_table(config: ExperimentConfig, init: GaussianBelief):
    """No-spike derivatives of the full filter across a mean grid."""
    enc = config.encoder
    var0 = init.variance
    spread = math.sqrt(var0 + float(enc.tc_cov[0, 0]) + float(enc.pop_cov[0, 0]))
    center = float(enc.center[0])
    grid = np.linspace(center - 4.0 * spread, center + 4.0 * spread, 201)
    rows = []
    for mu in grid:
        deriv = between_spike_derivative(
            config.model, enc, GaussianBelief.scalar(mu, var0),
            FilterMode.FULL_ADF)
        rows.append([mu, float(deriv.dmean[0]), float(deriv.dcov[0, 0]),
                     deriv.expected_rate])
    return ["mu", "dmu_dt", "dvar_dt", "expected_rate"], rows


def _cmd_filter(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    trial = take(cfg, "trial.index", int, 0)
    mode_names = take(cfg, "filter.modes", list, [FilterMode.FULL_ADF.value])
    try:
        modes = [FilterMode(name.strip()) for name in mode_names]
    except ValueError:
        raise ConfigError(
            f"key 'filter.modes': unknown mode in {mode_names!r}; valid: "
            + ", ".join(m.value for m in FilterMode))
    init = config.effective_init()
    if float(init.cov[0, 0]) <= 0.0:
        raise ConfigError(
            "the model starts from a point mass; set filter.var0 to give "
            "the decoder a proper prior")
    record = run_trial(config, trial, modes=modes)
    names = ["path.csv", "spikes.csv", "trial.csv", "phase.csv"]
    reports.write_path(os.path.join(args.out, "path.csv"),
                       record.path.times, record.path.states)
    reports.write_spike_train(os.path.join(args.out, "spikes.csv"), record.train)
    for label, result in record.results.items():
        name = f"belief_{label}.csv"
        reports.write_belief_series(os.path.join(args.out, name), result)
        names.append(name)
    header = ["t", "x"]
    columns = [record.path.times, record.path.states[:, 0]]
    for label, result in record.results.items():
        header += [f"mu_{label}", f"var_{label}"]
        columns += [result.means[:, 0], result.covs[:, 0, 0]]
    reports.write_csv(os.path.join(args.out, "trial.csv"), header,
                      zip(*columns))
    phase_header, phase_rows = _phase_table(config, init)
    reports.write_csv(os.path.join(args.out, "phase.csv"), phase_header,
                      phase_rows)
    _finish(args, "filter", config_text,
            _settings(config, trial=trial, modes=[m.value for m in modes],
                      spike_count=record.spike_count,
                      integrated_se=record.integrated_se), names)


def _cmd_compare_uniform(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    pop_vars = _float_list(cfg, "sweep.pop_vars", required=True)
    report = compare_uniform(config, pop_vars, threads=args.threads)
    header, rows = report.table()
    reports.write_csv(os.path.join(args.out, "uniform_compare.csv"), header, rows)
    _finish(args, "compare-uniform", config_text,
            _settings(config, pop_vars=pop_vars), ["uniform_compare.csv"])


def _cmd_sweep_center(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    centers = _float_list(cfg, "sweep.centers", required=True)
    rates = _float_list(cfg, "sweep.rate_scales")
    tc_vars = _float_list(cfg, "sweep.tc_vars")
    if (rates is None) == (tc_vars is None):
        raise ConfigError(
            "set exactly one of 'sweep.rate_scales' or 'sweep.tc_vars'")
    report = sweep_center(config, centers, rate_scales=rates,
                          tc_vars=tc_vars, threads=args.threads)
    header, rows = report.cells.table()
    reports.write_csv(os.path.join(args.out, "center_sweep_cells.csv"),
                      header, rows)
    header, rows = report.argmin_table()
    reports.write_csv(os.path.join(args.out, "center_sweep_argmin.csv"),
                      header, rows)
    _finish(args, "sweep-center", config_text,
            _settings(config, centers=centers, rate_scales=rates,
                      tc_vars=tc_vars),
            ["center_sweep_cells.csv", "center_sweep_argmin.csv"])


def _cmd_sweep_pop(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    centers = _float_list(cfg, "sweep.centers", required=True)
    pop_vars = _float_list(cfg, "sweep.pop_vars", required=True)
    report = sweep_population(config, centers, pop_vars, threads=args.threads)
    header, rows = report.cells_table()
    reports.write_csv(os.path.join(args.out, "pop_sweep_cells.csv"), header, rows)
    header, rows = report.argmin_table()
    reports.write_csv(os.path.join(args.out, "pop_sweep_argmin.csv"), header, rows)
    _finish(args, "sweep-pop", config_text,
            _settings(config, centers=centers, pop_vars=pop_vars),
            ["pop_sweep_cells.csv", "pop_sweep_argmin.csv"])


def _cmd_variance_mse(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    stride = take(cfg, "report.stride", int, 10)
    report = variance_vs_mse(config)
    header, rows = report.table(stride=stride)
    reports.write_csv(os.path.join(args.out, "variance_mse.csv"), header, rows)
    reports.write_csv(
        os.path.join(args.out, "variance_mse_summary.csv"),
        ["window_ratio", "stationary_var", "trials_used", "excluded"],
        [[report.window_ratio, report.stationary_var, report.trials_used,
          report.excluded]])
    print(f"window MSE / posterior-variance ratio: {report.window_ratio:.4f}")
    _finish(args, "variance-mse", config_text,
            _settings(config, stride=stride, window_ratio=report.window_ratio),
            ["variance_mse.csv", "variance_mse_summary.csv"])


def _cmd_validate_oracle(args, cfg, config_text):
    config = _build_experiment(cfg, args)
    particles = take(cfg, "pf.particles", int, required=True)
    report = validate_oracle(config, particles, threads=args.threads)
    header, rows = report.table()
    reports.write_csv(os.path.join(args.out, "oracle_trials.csv"), header, rows)
    header, rows = report.summary_table()
    reports.write_csv(os.path.join(args.out, "oracle_summary.csv"), header, rows)
    names = ["oracle_trials.csv", "oracle_summary.csv"]
    if report.sample_adf is not None:
        reports.write_belief_series(
            os.path.join(args.out, "oracle_adf_belief.csv"), report.sample_adf)
        reports.write_belief_series(
            os.path.join(args.out, "oracle_pf_belief.csv"), report.sample_pf)
        names += ["oracle_adf_belief.csv", "oracle_pf_belief.csv"]
    print(f"mean |mu gap| / pf std: {report.mean_gap_ratio:.4f}; "
          f"mean relative variance gap: {report.mean_rel_var_gap:.4f}")
    _finish(args, "validate-oracle", config_text,
            _settings(config, particles=particles,
                      mean_gap_ratio=report.mean_gap_ratio,
                      mean_rel_var_gap=report.mean_rel_var_gap), names)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "spikes": _cmd_spikes,
    "filter": _cmd_filter,
    "compare-uniform": _cmd_compare_uniform,
    "sweep-center": _cmd_sweep_center,
    "sweep-pop": _cmd_sweep_pop,
    "variance-mse": _cmd_variance_mse,
    "validate-oracle": _cmd_validate_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppfilter",
        description="Point-process filtering experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True,
                         help="flat key-value config file")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--seed", type=int, default=None,
                         help="master seed (overrides run.seed)")
        cmd.add_argument("--trials", type=int, default=None,
                         help="trial count (overrides run.trials)")
        cmd.add_argument("--dt", type=float, default=None,
                         help="grid step (overrides run.dt)")
        cmd.add_argument("--threads", type=int, default=1,
                         help="worker processes (does not change results)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config, "r", encoding="utf-8") as handle:
            config_text = handle.read()
        cfg = parse_config(config_text)
        os.makedirs(args.out, exist_ok=True)
        _COMMANDS[args.command](args, cfg, config_text)
    except (PpfilterError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
