"""Sequential Monte Carlo reference filter.

The particle filter is the package's oracle: it makes no Gaussian
assumption, so agreement with the closed-form filter is evidence the moment
equations are right. One step over [t, t+dt) does, in order,

  1. weight update at the current states: survival factor
     exp(-Lambda(x_i) dt) and one intensity factor lambda(theta_j, x_i) per
     spike falling in the step (states are evaluated at the step's left
     node, matching how the generator thins candidates),
  2. degeneracy check and normalization in log space,
  3. systematic resampling when the effective sample size drops below
     count / 2,
  4. Euler-Maruyama propagation to t + dt.

Weights live as log weights; resampling resets them to uniform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import StateModel, tabulate_control, time_grid
from .encoding import (EncoderParams, RateTables, SpikeTrain,
                       log_rate_density, rate_tables, total_rate)
from .errors import DegenerateEnsembleError
from .gaussian import GaussianBelief, as_vector
from .filtering import FilterDiagnostics, FilterResult


@dataclass
class ParticleEnsemble:
    """Weighted particle set: states (N, n) and log weights (N,)."""

    states: np.ndarray
    log_weights: np.ndarray

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=float))
        self.log_weights = as_vector(self.log_weights, self.states.shape[0])

    @property
    def count(self) -> int:
        return self.states.shape[0]

    def normalized_weights(self) -> np.ndarray:
        """Weights normalized to sum to one.

        Raises:
            DegenerateEnsembleError: if every weight underflowed.
        """
        peak = np.max(self.log_weights)
        if not np.isfinite(peak):
            raise DegenerateEnsembleError("all particle weights underflowed")
        w = np.exp(self.log_weights - peak)
        total = w.sum()
        if not np.isfinite(total) or total <= 0.0:
            raise DegenerateEnsembleError("particle weights do not normalize")
        return w / total


def init_ensemble(belief: GaussianBelief, count: int, seed) -> ParticleEnsemble:
    """Draw an equal-weight ensemble from a Gaussian belief."""
    rng = np.random.default_rng(seed)
    cov = belief.cov
    if np.any(cov):
        w, v = np.linalg.eigh(cov)
        root = v * np.sqrt(np.clip(w, 0.0, None))
        states = belief.mean + rng.standard_normal((count, belief.dim)) @ root.T
    else:
        states = np.tile(belief.mean, (count, 1))
    return ParticleEnsemble(states, np.zeros(count))


def effective_sample_size(ensemble: ParticleEnsemble) -> float:
    """ESS = 1 / sum(w_i^2) for normalized weights."""
    w = ensemble.normalized_weights()
    return float(1.0 / np.sum(w * w))


def systematic_resample(weights: np.ndarray, shift: float) -> np.ndarray:
    """Systematic resampling indices for normalized weights.

    Args:
        weights: normalized weights, shape (N,).
        shift: the single uniform in [0, 1) that places the comb.

    Returns:
        int indices of shape (N,), non-decreasing.
    """
    count = weights.shape[0]
    positions = (shift + np.arange(count)) / count
    cum = np.cumsum(weights)
    cum[-1] = 1.0  # guard the final edge against rounding
    return np.searchsorted(cum, positions, side="left")


def pf_step(ensemble: ParticleEnsemble, model: StateModel, enc: EncoderParams,
            dt: float, spikes_in_step: np.ndarray, seed,
            control_value=None,
            tables: RateTables | None = None) -> ParticleEnsemble:
    """Advance the ensemble across one grid step (see module docstring).

    Args:
        ensemble: current particles; not mutated.
        spikes_in_step: marks of the spikes in [t, t+dt), shape (J, m).
        seed: seed for this step's randomness (resampling shift then
            propagation noise), so a fixed per-step seed pins the run.
        tables: optional precomputed `rate_tables(enc)` for tight loops.

    Returns:
        New ensemble at time t + dt.
    """
    if tables is None:
        tables = rate_tables(enc)
    rng = np.random.default_rng(seed)
    states = ensemble.states
    logw = ensemble.log_weights - dt * total_rate(enc, states, tables)
    marks = np.atleast_2d(np.asarray(spikes_in_step, dtype=float))
    if marks.size:
        for theta in marks:
            logw = logw + log_rate_density(enc, theta, states, tables)
    stepped = ParticleEnsemble(states, logw)

    weights = stepped.normalized_weights()  # raises when degenerate
    ess = 1.0 / float(np.sum(weights * weights))
    if ess < 0.5 * stepped.count:
        idx = systematic_resample(weights, rng.uniform())
        states = states[idx]
        logw = np.zeros(stepped.count)

    drift = model.drift(states)
    if control_value is not None:
        drift = drift + as_vector(control_value, states.shape[1])
    noise = rng.standard_normal(states.shape)
    states = states + drift * dt + np.sqrt(dt) * (noise @ model.diffusion.T)
    return ParticleEnsemble(states, logw)


def pf_moments(ensemble: ParticleEnsemble) -> GaussianBelief:
    """Weighted mean and covariance of the ensemble (no bias correction)."""
    w = ensemble.normalized_weights()
    mean = w @ ensemble.states
    dev = ensemble.states - mean
    cov = (w[:, None] * dev).T @ dev
    return GaussianBelief(mean, 0.5 * (cov + cov.T))


def run_particle_filter(model: StateModel, enc: EncoderParams, train: SpikeTrain,
                        init: GaussianBelief, dt: float, count: int,
                        seed) -> FilterResult:
    """Filter a spike train with `count` particles, recording grid moments.

    Randomness is split into one stream for the initial ensemble and one per
    step, derived as default_rng([*seed, k]); spikes are binned to the step
    [t_k, t_{k+1}) containing them. Returns the same result shape as
    `run_filter` so trajectories can be compared column by column (the
    expected-rate trace holds the ESS instead).
    """
    base = [int(seed)] if np.isscalar(seed) else [int(s) for s in seed]
    times = time_grid(train.horizon, dt)
    steps = times.shape[0] - 1
    control = tabulate_control(model.control, times[:-1], model.dim)
    tables = rate_tables(enc)
    ens = init_ensemble(init, count, base + [0])

    bins = np.searchsorted(train.times, times)
    means = np.empty((steps + 1, model.dim))
    covs = np.empty((steps + 1, model.dim, model.dim))
    ess_trace = np.empty(steps + 1)

    def record(k: int) -> None:
        # same arithmetic as pf_moments, without re-validating a belief
        w = ens.normalized_weights()
        ess_trace[k] = 1.0 / float(np.sum(w * w))
        mean = w @ ens.states
        dev = ens.states - mean
        cov = (w[:, None] * dev).T @ dev
        means[k] = mean
        covs[k] = 0.5 * (cov + cov.T)

    record(0)
    for k in range(steps):
        marks = train.marks[bins[k]:bins[k + 1]]
        ens = pf_step(ens, model, enc, dt, marks, base + [k + 1], control[k],
                      tables)
        record(k + 1)

    diag = FilterDiagnostics(g_trace=ess_trace,
                             min_eig_trace=np.zeros(steps + 1),
                             jump_count=len(train))
    return FilterResult(times=times, means=means, covs=covs, diagnostics=diag)
