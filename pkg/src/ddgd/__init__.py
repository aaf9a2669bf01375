"""Consensus-based subgradient optimization over directed graphs.

D-DGD augments each agent with an auxiliary state so that a row-stochastic
and a column-stochastic matrix can be used together in place of a
doubly-stochastic one.
"""

from .algorithms import AgentStates, PushSumState, ddgd_step, ddgd_step_matrix, dgd_step, gradient_push_step
from .digraph import Digraph, is_strongly_connected, random_strongly_connected
from .errors import CertificationError, DDGDError, FitError, InputError, NumericError, WeightValidationError
from .harness import RunConfig, RunTrace, compare, density_sweep, rate_envelope, run
from .objective import LeastSquaresProblem, generate_least_squares, solve_centralized, weighted_objective
from .schedule import StepSchedule, persistence_check
from .spectral import certify, limit_matrix, power_convergence
from .weights import WeightSystem, assemble_m, epsilon_bound, uniform_weights, validate_epsilon

__version__ = "0.1.0"
