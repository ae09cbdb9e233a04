"""Latent state dynamics: linear or polynomial-drift diffusions.

The hidden state follows the Ito SDE

    dX_t = (drift(X_t) + u(t)) dt + D dW_t,     X_0 ~ N(mean0, cov0),

simulated with explicit Euler-Maruyama steps on the uniform grid
t_k = k dt. The same grid is shared with spike generation and filtering so
that paths, spike trains and belief trajectories line up sample by sample.

Drift comes in two flavours: `LinearDrift` holds a matrix A with
drift(x) = A x, and `SeriesDrift` holds a finite list of multi-index terms
drift(x) = sum_alpha coef_alpha * x^alpha evaluated exactly (no truncation
happens here; moment closure is the filter's business).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .errors import InvalidStepError, NotPositiveDefiniteError, UnstableDynamicsError
from .gaussian import GaussianBelief, as_matrix, as_vector, symmetrize

ControlSignal = Callable[[float], np.ndarray] | None


@dataclass(frozen=True)
class LinearDrift:
    """Drift x -> A x for a square matrix A."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = as_matrix(self.matrix)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError(f"drift matrix must be square, got {mat.shape}")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate A x; accepts a single state (n,) or a batch (N, n)."""
        return np.asarray(x, dtype=float) @ self.matrix.T


@dataclass(frozen=True)
class SeriesDrift:
    """Polynomial drift sum_alpha coef_alpha * x^alpha.

    `terms` maps integer multi-indices alpha (length n) to coefficient
    vectors of length n; e.g. 1-D drift -x + 0.1 x^3 is
    SeriesDrift.scalar({1: -1.0, 3: 0.1}).
    """

    terms: tuple[tuple[tuple[int, ...], np.ndarray], ...]

    def __post_init__(self):
        cleaned = []
        dim = None
        for alpha, coef in self.terms:
            alpha = tuple(int(k) for k in alpha)
            if any(k < 0 for k in alpha):
                raise ValueError(f"negative exponent in multi-index {alpha}")
            coef = as_vector(coef)
            if dim is None:
                dim = len(alpha)
            if len(alpha) != dim or coef.shape[0] != dim:
                raise ValueError("all terms must share the state dimension")
            cleaned.append((alpha, coef))
        if dim is None:
            raise ValueError("SeriesDrift needs at least one term")
        object.__setattr__(self, "terms", tuple(cleaned))

    @property
    def dim(self) -> int:
        return len(self.terms[0][0])

    @property
    def max_degree(self) -> int:
        return max(sum(alpha) for alpha, _ in self.terms)

    @classmethod
    def scalar(cls, coeffs: dict[int, float]) -> "SeriesDrift":
        """1-D helper: {power: coefficient} for drift sum_p c_p x^p."""
        terms = tuple(((p,), np.array([float(c)])) for p, c in sorted(coeffs.items()))
        return cls(terms)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate the polynomial; accepts (n,) or a batch (N, n)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        out = np.zeros_like(pts)
        for alpha, coef in self.terms:
            mono = np.ones(pts.shape[0])
            for axis, power in enumerate(alpha):
                if power:
                    mono = mono * pts[:, axis] ** power
            out += mono[:, None] * coef[None, :]
        return out[0] if single else out


@dataclass(frozen=True)
class StateModel:
    """Diffusion model: drift, diffusion matrix and initial distribution.

    `control`, when given, is a deterministic exogenous input u(t) added to
    the drift; it is evaluated on the simulation grid.
    """

    drift: LinearDrift | SeriesDrift
    diffusion: np.ndarray
    initial_mean: np.ndarray
    initial_cov: np.ndarray
    control: ControlSignal = field(default=None)

    def __post_init__(self):
        n = self.drift.dim
        object.__setattr__(self, "diffusion", as_matrix(self.diffusion, (n, n)))
        object.__setattr__(self, "initial_mean", as_vector(self.initial_mean, n))
        cov = symmetrize(as_matrix(self.initial_cov, (n, n)))
        if np.linalg.eigvalsh(cov)[0] < -1e-12 * (1.0 + np.max(np.abs(cov))):
            raise NotPositiveDefiniteError("initial covariance must be PSD")
        object.__setattr__(self, "initial_cov", cov)

    @property
    def dim(self) -> int:
        return self.drift.dim

    @classmethod
    def scalar(cls, a: float, d: float, mean0: float = 0.0, var0: float = 0.0,
               control: ControlSignal = None) -> "StateModel":
        """1-D model dX = (a X + u(t)) dt + d dW, X_0 ~ N(mean0, var0)."""
        return cls(LinearDrift(np.array([[float(a)]])), np.array([[float(d)]]),
                   np.array([float(mean0)]), np.array([[float(var0)]]), control)


@dataclass(frozen=True)
class StatePath:
    """A simulated trajectory sampled on the uniform grid."""

    times: np.ndarray   # (K+1,)
    states: np.ndarray  # (K+1, n)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def state_before(self, t: float) -> np.ndarray:
        """State at the nearest grid point <= t (grid left-limit lookup)."""
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.states[max(idx, 0)]


def time_grid(horizon: float, dt: float) -> np.ndarray:
    """Uniform grid t_k = k dt covering [0, horizon].

    Raises:
        InvalidStepError: if dt or horizon is non-positive, or horizon is
            not an integer number of steps (within 1e-9 relative).
    """
    if not (dt > 0.0) or not (horizon > 0.0):
        raise InvalidStepError(f"need dt > 0 and horizon > 0, got {dt}, {horizon}")
    steps = int(round(horizon / dt))
    if steps < 1 or abs(steps * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise InvalidStepError(
            f"horizon {horizon} is not an integer multiple of dt {dt}"
        )
    return np.arange(steps + 1) * dt


def tabulate_control(control: ControlSignal, times: np.ndarray, dim: int) -> np.ndarray:
    """Evaluate the control signal on grid nodes; zeros when absent."""
    out = np.zeros((times.shape[0], dim))
    if control is not None:
        for k, t in enumerate(times):
            out[k] = as_vector(control(float(t)), dim)
    return out


def sample_initial_state(model: StateModel, rng: np.random.Generator) -> np.ndarray:
    """Draw X_0; a zero covariance gives the mean deterministically."""
    cov = model.initial_cov
    if not np.any(cov):
        return model.initial_mean.copy()
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        # Singular but PSD: factor through the eigendecomposition.
        w, v = np.linalg.eigh(cov)
        chol = v * np.sqrt(np.clip(w, 0.0, None))
    return model.initial_mean + chol @ rng.standard_normal(model.dim)


def simulate_path(model: StateModel, horizon: float, dt: float, seed) -> StatePath:
    """Simulate one Euler-Maruyama trajectory on the grid t_k = k dt.

    The update is X_{k+1} = X_k + (drift(X_k) + u(t_k)) dt + D sqrt(dt) xi_k
    with xi_k standard normal. All randomness comes from
    `np.random.default_rng(seed)`: first the initial state, then the K noise
    vectors in step order, so a given seed pins the whole path.

    Returns:
        StatePath with times of shape (K+1,) and states of shape (K+1, n).
    """
    times = time_grid(horizon, dt)
    steps = times.shape[0] - 1
    rng = np.random.default_rng(seed)
    state = sample_initial_state(model, rng)
    noise = rng.standard_normal((steps, model.dim))
    control = tabulate_control(model.control, times[:-1], model.dim)
    states = np.empty((steps + 1, model.dim))
    states[0] = state
    scale = np.sqrt(dt)
    for k in range(steps):
        drift = model.drift(states[k])
        states[k + 1] = (states[k] + (drift + control[k]) * dt
                         + scale * (model.diffusion @ noise[k]))
    return StatePath(times=times, states=states)


def simulate_path_batch(model: StateModel, horizon: float, dt: float,
                        seeds: Sequence) -> np.ndarray:
    """Simulate one path per seed, vectorized across paths.

    Each path consumes its own generator `default_rng(seeds[i])` in exactly
    the order `simulate_path` does, so row i equals the single-path output
    for the same seed bit for bit.

    Returns:
        ndarray of shape (len(seeds), K+1, n).
    """
    times = time_grid(horizon, dt)
    steps = times.shape[0] - 1
    n = model.dim
    count = len(seeds)
    init = np.empty((count, n))
    noise = np.empty((count, steps, n))
    for i, seed in enumerate(seeds):
        rng = np.random.default_rng(seed)
        init[i] = sample_initial_state(model, rng)
        noise[i] = rng.standard_normal((steps, n))
    control = tabulate_control(model.control, times[:-1], n)
    states = np.empty((count, steps + 1, n))
    states[:, 0] = init
    scale = np.sqrt(dt)
    current = init
    for k in range(steps):
        drift = model.drift(current)
        current = (current + (drift + control[k]) * dt
                   + scale * (noise[:, k] @ model.diffusion.T))
        states[:, k + 1] = current
    return states


def steady_state_prior(model: StateModel) -> GaussianBelief:
    """Stationary law of the homogeneous linear system dX = A X dt + D dW.

    Solves the continuous Lyapunov equation A S + S A' + D D' = 0 for the
    stationary covariance. Any control input is ignored; the stationary
    mean of the homogeneous system is zero.

    Raises:
        UnstableDynamicsError: if A has an eigenvalue with Re >= 0.
        ValueError: if the drift is not linear.
    """
    if not isinstance(model.drift, LinearDrift):
        raise ValueError("steady_state_prior requires a linear drift")
    a = model.drift.matrix
    eigs = np.linalg.eigvals(a)
    if np.any(eigs.real >= 0.0):
        raise UnstableDynamicsError(
            f"drift eigenvalues must have negative real part, got {eigs}"
        )
    cov = solve_continuous_lyapunov(a, -model.diffusion @ model.diffusion.T)
    return GaussianBelief(np.zeros(model.dim), symmetrize(cov, tol=1e-9))
