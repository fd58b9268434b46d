"""Centre-of-mass wave-packet dynamics of a free-falling nanosphere.

Gaussian wave packets evolve under free dispersion, a self-gravity spring
and GRW-type localization jumps; ensembles of such trajectories give the
spread of the density matrix.
"""

from .collapse import JumpChannel, JumpEvent, apply_jump, sample_jump_location, sample_jump_times
from .constants import CONSTANTS
from .dynamics import EvolutionMode, IntegratorConfig, derivative, evolve, free_closed_form
from .ensemble import (
    EnsembleStats,
    ScenarioConfig,
    analytic_grw_spread,
    equilibrium_spread,
    run_ensemble,
    run_trajectory,
    simulate_ensemble,
    velocity_histogram,
)
from .exceptions import DomainError, NumericalError
from .self_gravity import SpringModel, bound_state, critical_lambda, spring_k, v_eff
from .state import EnvironmentSpec, GaussianState, NanosphereSpec, make_gaussian, spread

__version__ = "0.1.0"
