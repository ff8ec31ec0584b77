"""Double inverted pendulum with Pade-approximated delay, tuned by the bat algorithm."""

from .bat import BatConfig, OptimizationResult, SearchBounds, optimize
from .control import (PolePlacementController, closed_loop, controllability_rank, is_stable,
                      place_poles, poles_from_spec)
from .delay import pade_augment, pade_response
from .dynamics import (PhysicalParams, PlantState, kinetic_energy, nonlinear_derivative,
                       potential_energy, total_mass)
from .exceptions import (ConfigurationError, DegenerateParametersError, DivergenceError,
                         NumericalError, SynthesisError)
from .linearization import (PCoefficients, StateSpaceModel, jacobian_linear_model,
                            numeric_jacobian, p_coefficients, paper_linear_model)
from .sim import SimConfig, Trajectory, integrate_linear, integrate_nonlinear, ise_fitness, \
    settling_time
from .tuning import BatTunedController

__version__ = "0.1.0"
