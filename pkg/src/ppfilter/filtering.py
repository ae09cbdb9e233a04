"""Closed-form assumed-density filtering for point-process observations.

Between spikes the posterior is projected onto a Gaussian N(mu_t, cov_t)
whose moments follow deterministic ODEs. Writing S for the inverse of
(tc_cov + pop_cov + H cov H') and g for the expected total firing rate under
the current belief,

    g = rate_scale * sqrt(det tc_cov * det S) * exp(-0.5 ||H mu - c||^2_S),

    d(mu)/dt  = drift terms + u(t) + g * cov H' S (H mu - c),
    d(cov)/dt = drift terms + D D'
                + g * [cov H' S H cov - (cov H' S (H mu - c)) (...)'],

so silence pushes the estimate away from the population center and can
shrink the variance even though no spike arrived. At a spike with mark
theta the belief jumps by the conjugate Gaussian update with effective
observation noise tc_cov.

Three modes share this machinery:

  * FULL_ADF: linear drift, all terms as above.
  * UNIFORM_CODING: the g-terms are dropped (exactly what remains in the
    translation-invariant population limit); jumps are unchanged. Between
    spikes the belief just follows the prior moment equations.
  * NONLINEAR_ADF: polynomial drift; the drift terms are the exact Gaussian
    expectations E[drift(X)] and E[drift(X) (X-mu)'] + transpose, evaluated
    by recentering the polynomial at mu and applying the normal pairing
    rule. With a purely linear series this reduces to FULL_ADF.

Integration is explicit Euler on the shared grid. A spike splits its step:
integrate to the spike time, jump, continue; a spike landing exactly on a
grid node is applied after the ODE step ending at that node.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .dynamics import LinearDrift, SeriesDrift, StateModel, tabulate_control, time_grid
from .encoding import (EncoderParams, FinitePopulation, GaussianPopulation,
                       SpikeTrain, UniformPopulation, max_total_rate)
from .errors import NotPositiveDefiniteError, StepTooLargeError
from .gaussian import (GaussianBelief, as_vector, cholesky_pd, isserlis_moment,
                       min_eig_sym)

MAX_STEP_HALVINGS = 6


class FilterMode(enum.Enum):
    FULL_ADF = "full_adf"
    UNIFORM_CODING = "uniform_coding"
    NONLINEAR_ADF = "nonlinear_adf"


class BeliefDerivative(NamedTuple):
    """Time derivative of the belief moments plus the rate it used."""

    dmean: np.ndarray
    dcov: np.ndarray
    expected_rate: float


@dataclass(frozen=True)
class FilterDiagnostics:
    """Per-node traces recorded alongside the belief trajectory."""

    g_trace: np.ndarray        # expected total rate at each grid node
    min_eig_trace: np.ndarray  # smallest covariance eigenvalue at each node
    jump_count: int


@dataclass(frozen=True)
class FilterResult:
    """Belief trajectory on the grid: times (K+1,), means (K+1, n),
    covariances (K+1, n, n), and diagnostics."""

    times: np.ndarray
    means: np.ndarray
    covs: np.ndarray
    diagnostics: FilterDiagnostics

    def belief_at(self, index: int) -> GaussianBelief:
        return GaussianBelief(self.means[index], self.covs[index])


def expected_total_rate(enc: EncoderParams, belief: GaussianBelief) -> float:
    """Expected total firing rate g = E[Lambda(X)] under the belief.

    For the Gaussian population the expectation is the closed form in the
    module docstring and always lies in (0, rate_scale]. For the uniform
    population the total rate is state-independent, and for a finite
    population the per-neuron expectations are summed explicitly.
    """
    h = enc.obs_matrix
    proj_cov = h @ belief.cov @ h.T
    proj_mean = h @ belief.mean
    chol_tc = cholesky_pd(enc.tc_cov)
    if isinstance(enc.population, UniformPopulation):
        return max_total_rate(enc)
    if isinstance(enc.population, GaussianPopulation):
        chol_s = cholesky_pd(enc.tc_cov + enc.pop_cov + proj_cov)
        z = solve_triangular(chol_s, proj_mean - enc.center, lower=True)
        det_ratio = np.prod(np.diag(chol_tc) / np.diag(chol_s))
        return enc.rate_scale * float(det_ratio) * math.exp(-0.5 * float(z @ z))
    peak = enc.rate_scale / enc.population.preferred.shape[0]
    chol_s = cholesky_pd(enc.tc_cov + proj_cov)
    det_ratio = np.prod(np.diag(chol_tc) / np.diag(chol_s))
    acc = 0.0
    for theta in enc.population.preferred:
        z = solve_triangular(chol_s, proj_mean - theta, lower=True)
        acc += peak * float(det_ratio) * math.exp(-0.5 * float(z @ z))
    return acc


def _multi_indices_upto(alpha: tuple[int, ...]):
    """All beta with 0 <= beta <= alpha componentwise."""
    if not alpha:
        yield ()
        return
    for head in range(alpha[0] + 1):
        for tail in _multi_indices_upto(alpha[1:]):
            yield (head,) + tail


def _recenter_series(drift: SeriesDrift, mean: np.ndarray):
    """Rewrite sum_alpha coef_alpha x^alpha as a polynomial in (x - mean).

    Exact multi-binomial expansion; returns {beta: coefficient vector}.
    """
    out: dict[tuple[int, ...], np.ndarray] = {}
    for alpha, coef in drift.terms:
        for beta in _multi_indices_upto(alpha):
            weight = 1.0
            for a_k, b_k, mu_k in zip(alpha, beta, mean):
                weight *= math.comb(a_k, b_k) * mu_k ** (a_k - b_k)
            if weight != 0.0:
                prev = out.get(beta)
                out[beta] = coef * weight if prev is None else prev + coef * weight
    return out


def _series_moment_terms(drift: SeriesDrift, mean: np.ndarray, cov: np.ndarray):
    """Exact Gaussian closure of the drift terms for a polynomial drift.

    Returns (E[drift(X)], E[drift(X) (X - mean)']) under N(mean, cov): the
    polynomial is recentered at the mean and each centered monomial is
    integrated by the normal pairing rule.
    """
    n = mean.shape[0]
    centered = _recenter_series(drift, mean)
    if all(sum(beta) <= 1 for beta in centered):
        # Degree <= 1 after recentering: assemble the affine form and use the
        # same matrix expressions as the linear filter (identical floats).
        const = np.zeros(n)
        mat = np.zeros((n, n))
        for beta, coef in centered.items():
            if sum(beta) == 0:
                const = coef
            else:
                mat[:, beta.index(1)] = coef
        return const, mat @ cov
    mean_term = np.zeros(n)
    cross = np.zeros((n, n))
    unit = np.eye(n, dtype=int)
    for beta, coef in centered.items():
        mean_term += coef * isserlis_moment(beta, cov)
        for j in range(n):
            cross[:, j] += coef * isserlis_moment(tuple(beta + unit[j]), cov)
    return mean_term, cross


def _drift_terms(model: StateModel, mean: np.ndarray, cov: np.ndarray,
                 mode: FilterMode):
    """Mean drift E[drift(X)] and cross term E[drift(X)(X-mu)'] for the mode."""
    drift = model.drift
    if isinstance(drift, LinearDrift):
        return drift.matrix @ mean, drift.matrix @ cov
    if mode == FilterMode.FULL_ADF:
        raise ValueError("FULL_ADF requires a linear drift; use NONLINEAR_ADF")
    return _series_moment_terms(drift, mean, cov)


def between_spike_derivative(model: StateModel, enc: EncoderParams,
                             belief: GaussianBelief, mode: FilterMode,
                             control_value=None) -> BeliefDerivative:
    """Moment ODE right-hand side between spikes.

    Args:
        model: state dynamics (supplies drift and diffusion).
        enc: encoder parameters (Gaussian population for the ADF modes).
        belief: current Gaussian belief.
        mode: which filter variant.
        control_value: optional exogenous input u(t) added to the mean.

    Returns:
        BeliefDerivative(dmean, dcov, expected_rate); in UNIFORM_CODING mode
        the returned rate is the diagnostic expected rate, but no rate term
        enters the derivatives.
    """
    mean, cov = belief.mean, belief.cov
    diff = model.diffusion @ model.diffusion.T
    drift_mean, drift_cross = _drift_terms(model, mean, cov, mode)
    dmean = drift_mean.copy()
    if control_value is not None:
        dmean = dmean + as_vector(control_value, mean.shape[0])
    dcov = drift_cross + drift_cross.T + diff

    if mode == FilterMode.UNIFORM_CODING:
        return BeliefDerivative(dmean, dcov, expected_total_rate(enc, belief))

    if not isinstance(enc.population, GaussianPopulation):
        raise ValueError("ADF rate terms require a Gaussian population")
    h = enc.obs_matrix
    proj_mean = h @ mean
    dev = proj_mean - enc.center
    s_inv = enc.tc_cov + enc.pop_cov + h @ cov @ h.T
    chol_s = cholesky_pd(s_inv)
    chol_tc = cholesky_pd(enc.tc_cov)
    z = solve_triangular(chol_s, dev, lower=True)
    det_ratio = np.prod(np.diag(chol_tc) / np.diag(chol_s))
    g = enc.rate_scale * float(det_ratio) * math.exp(-0.5 * float(z @ z))

    gain = cov @ cho_solve((chol_s, True), h).T  # cov H' S, shape (n, m)
    pulled = gain @ dev
    dmean += g * pulled
    dcov = dcov + g * (gain @ (h @ cov) - np.outer(pulled, pulled))
    return BeliefDerivative(dmean, 0.5 * (dcov + dcov.T), g)


def apply_spike(enc: EncoderParams, belief: GaussianBelief, theta) -> GaussianBelief:
    """Condition the belief on one spike with mark theta.

    The update is the conjugate Gaussian step with observation H x and
    effective noise tc_cov:

        gain  = cov H' (tc_cov + H cov H')^-1,
        mean+ = mean + gain (theta - H mean),
        cov+  = cov - gain H cov,

    and notably the covariance jump does not depend on theta.
    """
    theta = as_vector(theta, enc.mark_dim)
    h = enc.obs_matrix
    mean, cov = belief.mean, belief.cov
    chol = cholesky_pd(enc.tc_cov + h @ cov @ h.T)
    gain = cov @ cho_solve((chol, True), h).T
    new_mean = mean + gain @ (theta - h @ mean)
    new_cov = cov - gain @ (h @ cov)
    return GaussianBelief(new_mean, 0.5 * (new_cov + new_cov.T))


def _euler_interval(model, enc, mean, cov, mode, control_value, length, t0):
    """Integrate the moment ODEs over `length`, halving the step on failure.

    Tries the interval as a single Euler step; if the updated covariance
    fails the Cholesky test, retries with 2, 4, ..., 2^MAX_STEP_HALVINGS
    substeps before raising StepTooLargeError.
    """
    if length <= 0.0:
        return mean, cov
    for level in range(MAX_STEP_HALVINGS + 1):
        parts = 2 ** level
        h = length / parts
        cur_mean, cur_cov = mean, cov
        ok = True
        for _ in range(parts):
            deriv = between_spike_derivative(
                model, enc, GaussianBelief(cur_mean, cur_cov), mode, control_value)
            cur_mean = cur_mean + h * deriv.dmean
            nxt = cur_cov + h * deriv.dcov
            cur_cov = 0.5 * (nxt + nxt.T)
            try:
                np.linalg.cholesky(cur_cov)
            except np.linalg.LinAlgError:
                ok = False
                break
        if ok:
            return cur_mean, cur_cov
    raise StepTooLargeError(
        f"covariance lost positive definiteness near t={t0:.6g} "
        f"even with {2 ** MAX_STEP_HALVINGS} substeps"
    )


def run_filter(model: StateModel, enc: EncoderParams, train: SpikeTrain,
               init: GaussianBelief, dt: float, mode: FilterMode) -> FilterResult:
    """Run one filter over a spike train on the grid t_k = k dt.

    The horizon is taken from the train. Within each grid step, spikes are
    applied in time order with the ODE integrated piecewise between them
    (integrate to the spike's left limit, jump, continue); a spike exactly
    on a grid node is processed after the ODE step ending at that node. The
    covariance is symmetrized after every Euler substep and each failure of
    the Cholesky test triggers step halving (see `_euler_interval`).

    Returns:
        FilterResult with the belief at every grid node and diagnostics
        (expected-rate trace, minimum-eigenvalue trace, jump count).
    """
    if mode in (FilterMode.FULL_ADF, FilterMode.NONLINEAR_ADF):
        if not isinstance(enc.population, GaussianPopulation):
            raise ValueError(f"{mode.name} requires a Gaussian population")
    if mode == FilterMode.NONLINEAR_ADF and not isinstance(model.drift, SeriesDrift):
        raise ValueError("NONLINEAR_ADF requires a SeriesDrift model")
    if enc.state_dim != model.dim:
        raise ValueError("encoder observation matrix does not match state dim")

    times = time_grid(train.horizon, dt)
    steps = times.shape[0] - 1
    n = model.dim
    cholesky_pd(init.cov)  # the filter needs a strictly PD starting belief
    control = tabulate_control(model.control, times[:-1], n)

    # Map each spike to the step whose closing node it precedes or hits.
    spike_steps = np.maximum(
        np.searchsorted(times, train.times, side="left") - 1, 0)
    starts = np.searchsorted(spike_steps, np.arange(steps), side="left")
    ends = np.searchsorted(spike_steps, np.arange(steps), side="right")

    means = np.empty((steps + 1, n))
    covs = np.empty((steps + 1, n, n))
    g_trace = np.empty(steps + 1)
    min_eig = np.empty(steps + 1)
    mean, cov = init.mean.copy(), init.cov.copy()
    means[0], covs[0] = mean, cov
    g_trace[0] = expected_total_rate(enc, init)
    min_eig[0] = min_eig_sym(cov)
    jumps = 0

    for k in range(steps):
        t_left, t_right = times[k], times[k + 1]
        u_k = control[k]
        cursor = t_left
        for idx in range(starts[k], ends[k]):
            s = min(float(train.times[idx]), float(t_right))
            mean, cov = _euler_interval(
                model, enc, mean, cov, mode, u_k, s - cursor, cursor)
            updated = apply_spike(enc, GaussianBelief(mean, cov), train.marks[idx])
            mean, cov = updated.mean, updated.cov
            jumps += 1
            cursor = s
        mean, cov = _euler_interval(
            model, enc, mean, cov, mode, u_k, t_right - cursor, cursor)
        means[k + 1], covs[k + 1] = mean, cov
        g_trace[k + 1] = expected_total_rate(enc, GaussianBelief(mean, cov))
        min_eig[k + 1] = min_eig_sym(cov)

    diag = FilterDiagnostics(g_trace=g_trace, min_eig_trace=min_eig,
                             jump_count=jumps)
    return FilterResult(times=times, means=means, covs=covs, diagnostics=diag)
