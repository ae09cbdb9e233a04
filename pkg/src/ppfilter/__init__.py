"""Continuous-time filtering of diffusions observed through marked
point-process spike trains.

The package simulates linear (or polynomial-drift) diffusions, encodes them
through Poisson-spiking populations with Gaussian tuning curves, and decodes
with a closed-form assumed-density filter. A particle filter provides an
independent numerical reference, and the experiment layer reproduces the
coding-parameter sweeps shipped with the command-line tool.
"""

from .dynamics import (LinearDrift, SeriesDrift, StateModel, StatePath,
                       simulate_path, simulate_path_batch, steady_state_prior,
                       time_grid)
from .encoding import (EncoderParams, FinitePopulation, GaussianPopulation,
                       SpikeTrain, UniformPopulation, generate_spikes,
                       mark_distribution, total_rate)
from .errors import (ConfigError, DegenerateEnsembleError, InvalidStepError,
                     NotPositiveDefiniteError, PpfilterError,
                     SingularCombinationError, StepTooLargeError,
                     UnstableDynamicsError)
from .experiments import (ExperimentConfig, compare_uniform, run_trial,
                          sweep_center, sweep_population, validate_oracle,
                          variance_vs_mse)
from .filtering import (FilterMode, FilterResult, apply_spike,
                        between_spike_derivative, expected_total_rate,
                        run_filter)
from .gaussian import (GaussianBelief, complete_squares, gaussian_density,
                       isserlis_moment)
from .particle import run_particle_filter

__all__ = [
    "ConfigError",
    "DegenerateEnsembleError",
    "EncoderParams",
    "ExperimentConfig",
    "FilterMode",
    "FilterResult",
    "FinitePopulation",
    "GaussianBelief",
    "GaussianPopulation",
    "InvalidStepError",
    "LinearDrift",
    "NotPositiveDefiniteError",
    "PpfilterError",
    "SeriesDrift",
    "SingularCombinationError",
    "SpikeTrain",
    "StateModel",
    "StatePath",
    "StepTooLargeError",
    "UniformPopulation",
    "UnstableDynamicsError",
    "apply_spike",
    "between_spike_derivative",
    "compare_uniform",
    "complete_squares",
    "expected_total_rate",
    "gaussian_density",
    "generate_spikes",
    "isserlis_moment",
    "mark_distribution",
    "run_filter",
    "run_particle_filter",
    "run_trial",
    "simulate_path",
    "simulate_path_batch",
    "steady_state_prior",
    "sweep_center",
    "sweep_population",
    "time_grid",
    "total_rate",
    "validate_oracle",
    "variance_vs_mse",
]

__version__ = "0.1.0"
