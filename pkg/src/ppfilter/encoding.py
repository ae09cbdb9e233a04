"""Marked point-process observations of a latent state.

A population of tuning curves indexed by the preferred mark theta fires as a
doubly stochastic Poisson process. Given the state x, a spike with mark in
d(theta) occurs with intensity

    lambda(theta, x) d(theta)
        = rate_scale * f(theta) * exp(-0.5 ||H x - theta||^2_R) d(theta),

where R is the inverse tuning-curve covariance and f is the population
density over preferred marks:

  * GaussianPopulation: f(theta) = N(theta; center, pop_cov), the
    infinite-population Gaussian blanket; `rate_scale` is the peak rate of a
    neuron whose preferred mark sits at the population center.
  * UniformPopulation:  f == 1 (improper, translation invariant);
    `rate_scale` is a rate density per unit mark volume.
  * FinitePopulation:   M discrete neurons with preferred marks theta_i and
    per-neuron peak rate rate_scale / M.

Spikes are generated by exact thinning of a dominating homogeneous Poisson
process, with the state looked up at the nearest simulation grid point at or
before the candidate time, so no rate-integration bias enters beyond the
grid resolution of the path itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .gaussian import GaussianBelief, as_matrix, as_vector, cholesky_pd, symmetrize
from .dynamics import StatePath


@dataclass(frozen=True)
class GaussianPopulation:
    """Continuum of tuning curves with Gaussian preferred-mark density."""


@dataclass(frozen=True)
class UniformPopulation:
    """Continuum of tuning curves with flat preferred-mark density."""


@dataclass(frozen=True)
class FinitePopulation:
    """Finite set of neurons given by their preferred marks, shape (M, m)."""

    preferred: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.preferred, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError(f"preferred marks must be (M, m), got {arr.shape}")
        object.__setattr__(self, "preferred", arr)


PopulationKind = GaussianPopulation | UniformPopulation | FinitePopulation


@dataclass(frozen=True)
class EncoderParams:
    """Population-coding parameters.

    Attributes:
        center: population center c, shape (m,); unused for the uniform and
            finite kinds (may be None there).
        pop_cov: preferred-mark covariance, PD (m, m); Gaussian kind only.
        tc_cov: tuning-curve covariance, PD (m, m).
        rate_scale: overall rate factor, > 0 (see module docstring for the
            per-kind meaning).
        obs_matrix: observation matrix H of shape (m, n) with m <= n.
        population: which preferred-mark density applies.
    """

    center: np.ndarray | None
    pop_cov: np.ndarray | None
    tc_cov: np.ndarray
    rate_scale: float
    obs_matrix: np.ndarray
    population: PopulationKind = field(default_factory=GaussianPopulation)

    def __post_init__(self):
        h = as_matrix(self.obs_matrix)
        m, n = h.shape
        if m > n:
            raise ValueError(f"mark dimension {m} exceeds state dimension {n}")
        tc = symmetrize(as_matrix(self.tc_cov, (m, m)))
        cholesky_pd(tc)
        if not self.rate_scale > 0.0:
            raise ValueError(f"rate_scale must be positive, got {self.rate_scale}")
        center = None if self.center is None else as_vector(self.center, m)
        pop = self.pop_cov
        if isinstance(self.population, GaussianPopulation):
            if center is None or pop is None:
                raise ValueError("Gaussian population needs center and pop_cov")
            pop = symmetrize(as_matrix(pop, (m, m)))
            cholesky_pd(pop)
        elif pop is not None:
            raise ValueError("pop_cov only applies to the Gaussian population")
        if isinstance(self.population, FinitePopulation):
            if self.population.preferred.shape[1] != m:
                raise ValueError("preferred marks must have the mark dimension")
        object.__setattr__(self, "obs_matrix", h)
        object.__setattr__(self, "tc_cov", tc)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "pop_cov", pop)
        object.__setattr__(self, "rate_scale", float(self.rate_scale))

    @property
    def mark_dim(self) -> int:
        return self.obs_matrix.shape[0]

    @property
    def state_dim(self) -> int:
        return self.obs_matrix.shape[1]

    @classmethod
    def scalar(cls, center: float, pop_var: float, tc_var: float,
               rate_scale: float) -> "EncoderParams":
        """1-D Gaussian-population encoder with H = [[1]]."""
        return cls(np.array([center]), np.array([[pop_var]]),
                   np.array([[tc_var]]), rate_scale, np.eye(1))

    @classmethod
    def scalar_uniform(cls, tc_var: float, rate_scale: float) -> "EncoderParams":
        """1-D uniform-population encoder with H = [[1]]."""
        return cls(None, None, np.array([[tc_var]]), rate_scale, np.eye(1),
                   UniformPopulation())


@dataclass(frozen=True)
class SpikeTrain:
    """Observed spikes: strictly increasing times in [0, horizon), marks (N, m)."""

    times: np.ndarray
    marks: np.ndarray
    horizon: float

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        marks = np.asarray(self.marks, dtype=float)
        if marks.ndim == 1:
            marks = marks[:, None]
        if times.ndim != 1 or marks.shape[0] != times.shape[0]:
            raise ValueError("times and marks must align (N,), (N, m)")
        if times.size:
            if np.any(np.diff(times) <= 0.0):
                raise ValueError("spike times must be strictly increasing")
            if times[0] < 0.0 or times[-1] >= self.horizon:
                raise ValueError("spike times must lie in [0, horizon)")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "marks", marks)
        object.__setattr__(self, "horizon", float(self.horizon))

    def __len__(self) -> int:
        return self.times.shape[0]

    @classmethod
    def empty(cls, mark_dim: int, horizon: float) -> "SpikeTrain":
        return cls(np.empty(0), np.empty((0, mark_dim)), horizon)


def _tc_weight(enc: EncoderParams) -> np.ndarray:
    """Inverse tuning-curve covariance R."""
    return np.linalg.inv(enc.tc_cov)


def _chol_quad(chol: np.ndarray, dev: np.ndarray) -> np.ndarray:
    """||L^-1 dev_i||^2 row-wise for dev of shape (N, m)."""
    if chol.shape[0] == 1:
        z = dev[:, 0] / chol[0, 0]
        return z * z
    z = solve_triangular(chol, dev.T, lower=True)
    return np.sum(z * z, axis=0)


@dataclass(frozen=True)
class RateTables:
    """Factorizations shared by every rate evaluation of one encoder.

    Build once with `rate_tables` and pass to `total_rate` and
    `log_rate_density` inside tight loops; the functions rebuild the tables
    on each call otherwise. `chol_sum` and `chol_pop` stay None for the
    populations that do not need them.
    """

    rate_max: float
    chol_tc: np.ndarray
    chol_sum: np.ndarray | None
    chol_pop: np.ndarray | None
    log_norm_pop: float


def rate_tables(enc: EncoderParams) -> RateTables:
    m = enc.mark_dim
    chol_tc = cholesky_pd(enc.tc_cov)
    chol_sum = chol_pop = None
    log_norm_pop = 0.0
    if isinstance(enc.population, GaussianPopulation):
        chol_sum = cholesky_pd(enc.tc_cov + enc.pop_cov)
        chol_pop = cholesky_pd(enc.pop_cov)
        det_ratio = np.prod(np.diag(chol_tc) / np.diag(chol_sum))
        rate_max = enc.rate_scale * float(det_ratio)
        log_norm_pop = float(-np.sum(np.log(np.diag(chol_pop)))
                             - 0.5 * m * np.log(2.0 * np.pi))
    elif isinstance(enc.population, UniformPopulation):
        rate_max = enc.rate_scale * float(
            (2.0 * np.pi) ** (m / 2.0) * np.prod(np.diag(chol_tc))
        )
    else:
        rate_max = enc.rate_scale
        log_norm_pop = -float(np.log(enc.population.preferred.shape[0]))
    return RateTables(rate_max=rate_max, chol_tc=chol_tc, chol_sum=chol_sum,
                      chol_pop=chol_pop, log_norm_pop=log_norm_pop)


def max_total_rate(enc: EncoderParams) -> float:
    """State-free upper bound on the total firing rate (thinning envelope).

    For the Gaussian population the bound is attained at H x = c; for the
    uniform population the total rate is exactly state-independent; for a
    finite population the bound is the sum of per-neuron peak rates.
    """
    return rate_tables(enc).rate_max


def total_rate(enc: EncoderParams, x,
               tables: RateTables | None = None) -> float | np.ndarray:
    """Total firing rate Lambda(x) = integral of lambda(theta, x) d(theta).

    For the Gaussian population this is the closed form

        rate_scale * sqrt(det tc_cov / det(tc_cov + pop_cov))
            * exp(-0.5 ||H x - c||^2_{(tc_cov + pop_cov)^-1});

    for the uniform population it is constant in x, and for a finite
    population it is the explicit sum of per-neuron rates.

    Args:
        enc: encoder parameters.
        x: state of shape (n,) (scalars accepted when n = 1) or batch (N, n).
        tables: optional precomputed `rate_tables(enc)`.

    Returns:
        float for a single state, ndarray (N,) for a batch.
    """
    if tables is None:
        tables = rate_tables(enc)
    pts = np.asarray(x, dtype=float)
    single = pts.ndim < 2
    pts = pts.reshape(-1, enc.state_dim)
    proj = pts @ enc.obs_matrix.T
    if isinstance(enc.population, UniformPopulation):
        out = np.full(pts.shape[0], tables.rate_max)
    elif isinstance(enc.population, GaussianPopulation):
        quad = _chol_quad(tables.chol_sum, proj - enc.center)
        out = tables.rate_max * np.exp(-0.5 * quad)
    else:
        peak = enc.rate_scale / enc.population.preferred.shape[0]
        out = np.zeros(pts.shape[0])
        for theta in enc.population.preferred:
            out += peak * np.exp(-0.5 * _chol_quad(tables.chol_tc, proj - theta))
    return float(out[0]) if single else out


def log_rate_density(enc: EncoderParams, theta, x,
                     tables: RateTables | None = None) -> float | np.ndarray:
    """log lambda(theta, x) for a fixed observed mark theta.

    Vectorized over a batch of states, which is the shape particle-filter
    weight updates need. For a finite population the mark identifies the
    neuron, so the population factor is the per-neuron peak rate.
    """
    if tables is None:
        tables = rate_tables(enc)
    theta = as_vector(theta, enc.mark_dim)
    pts = np.asarray(x, dtype=float)
    single = pts.ndim < 2
    pts = pts.reshape(-1, enc.state_dim)
    dev = pts @ enc.obs_matrix.T - theta
    quad = _chol_quad(tables.chol_tc, dev)
    if isinstance(enc.population, GaussianPopulation):
        if enc.mark_dim == 1:
            zc = (theta[0] - enc.center[0]) / tables.chol_pop[0, 0]
            log_pop = -0.5 * zc * zc + tables.log_norm_pop
        else:
            zc = solve_triangular(tables.chol_pop, theta - enc.center,
                                  lower=True)
            log_pop = -0.5 * float(zc @ zc) + tables.log_norm_pop
    else:
        log_pop = tables.log_norm_pop
    out = np.log(enc.rate_scale) + log_pop - 0.5 * quad
    return float(out[0]) if single else out


def mark_distribution(enc: EncoderParams, x) -> GaussianBelief:
    """Law of the mark of a spike emitted at state x.

    Gaussian population: normalizing lambda(theta, x) over theta gives

        theta | spike at x ~ N((F+R)^-1 (F c + R H x), (F+R)^-1),

    with F = pop_cov^-1 and R = tc_cov^-1; the uniform population gives
    N(H x, tc_cov). Not defined for a finite population (marks are discrete).
    """
    x = as_vector(x, enc.state_dim)
    proj = enc.obs_matrix @ x
    if isinstance(enc.population, UniformPopulation):
        return GaussianBelief(proj, enc.tc_cov)
    if isinstance(enc.population, FinitePopulation):
        raise ValueError("mark_distribution is undefined for a finite population")
    pop_prec = np.linalg.inv(enc.pop_cov)
    tc_prec = _tc_weight(enc)
    cov = np.linalg.inv(pop_prec + tc_prec)
    mean = cov @ (pop_prec @ enc.center + tc_prec @ proj)
    return GaussianBelief(mean, symmetrize(cov, tol=1e-9))


def _dedupe_times(times: np.ndarray) -> np.ndarray:
    """Break exact ties by bumping the later event one ulp at a time."""
    for i in range(1, times.shape[0]):
        while times[i] <= times[i - 1]:
            times[i] = np.nextafter(times[i], np.inf)
    return times


def _sample_marks(enc: EncoderParams, proj: np.ndarray,
                  rng: np.random.Generator) -> np.ndarray:
    """Draw one mark per row of proj = H x at the spike times."""
    m = enc.mark_dim
    count = proj.shape[0]
    if isinstance(enc.population, UniformPopulation):
        mean = proj
        chol = cholesky_pd(enc.tc_cov)
    else:
        pop_prec = np.linalg.inv(enc.pop_cov)
        tc_prec = _tc_weight(enc)
        cov = np.linalg.inv(pop_prec + tc_prec)
        mean = (proj @ tc_prec.T + enc.center @ pop_prec.T) @ cov.T
        chol = cholesky_pd(symmetrize(cov, tol=1e-9))
    return mean + rng.standard_normal((count, m)) @ chol.T


def generate_spikes(enc: EncoderParams, path: StatePath, seed) -> SpikeTrain:
    """Sample a marked spike train from a state path by exact thinning.

    Candidates are drawn from a homogeneous Poisson process at the envelope
    rate `max_total_rate(enc)` and kept with probability
    total_rate(x_t) / envelope, evaluating the state at the nearest grid
    point <= t. Accepted events then receive marks from the conditional mark
    law. Everything is driven by `default_rng(seed)` in a fixed draw order
    (count, times, acceptance uniforms, mark normals), so a seed pins the
    train. Exact time ties are broken by a one-ulp perturbation.
    """
    rng = np.random.default_rng(seed)
    horizon = float(path.times[-1])
    m = enc.mark_dim

    if isinstance(enc.population, FinitePopulation):
        preferred = enc.population.preferred
        peak = enc.rate_scale / preferred.shape[0]
        chol_tc = cholesky_pd(enc.tc_cov)
        all_times, all_marks = [], []
        for theta in preferred:
            count = rng.poisson(peak * horizon)
            times = np.sort(rng.uniform(0.0, horizon, count))
            accept_u = rng.uniform(size=count)
            idx = np.searchsorted(path.times, times, side="right") - 1
            proj = path.states[idx] @ enc.obs_matrix.T
            keep = accept_u < np.exp(-0.5 * _chol_quad(chol_tc, proj - theta))
            all_times.append(times[keep])
            all_marks.append(np.broadcast_to(theta, (int(keep.sum()), m)))
        times = np.concatenate(all_times)
        marks = np.concatenate(all_marks)
        order = np.argsort(times, kind="stable")
        times = _dedupe_times(times[order].copy())
        return SpikeTrain(times, marks[order], horizon)

    envelope = max_total_rate(enc)
    count = rng.poisson(envelope * horizon)
    times = np.sort(rng.uniform(0.0, horizon, count))
    accept_u = rng.uniform(size=count)
    idx = np.searchsorted(path.times, times, side="right") - 1
    proj = path.states[idx] @ enc.obs_matrix.T
    if isinstance(enc.population, UniformPopulation):
        keep = np.ones(count, dtype=bool)  # envelope is exact, nothing to thin
    else:
        chol_sum = cholesky_pd(enc.tc_cov + enc.pop_cov)
        keep = accept_u < np.exp(-0.5 * _chol_quad(chol_sum, proj - enc.center))
    times = _dedupe_times(times[keep].copy())
    marks = _sample_marks(enc, proj[keep], rng)
    return SpikeTrain(times, marks, horizon)


def empirical_rate_histogram(train: SpikeTrain, bins=50, mark_range=None):
    """Histogram of observed marks.

    Args:
        train: spike train.
        bins: bin count (per axis for multivariate marks).
        mark_range: optional (lo, hi) per axis, as np.histogramdd expects.

    Returns:
        (counts, edges) with edges a list of per-axis bin edge arrays.
    """
    counts, edges = np.histogramdd(train.marks, bins=bins, range=mark_range)
    return counts, edges
