"""Bat-algorithm tuning of (damping factor, natural frequency) for the pendulum loop."""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bat import PENALTY, BatConfig, SearchBounds, optimize
from .control import PolePlacementController
from .delay import pade_augment
from .dynamics import PhysicalParams
from .exceptions import ConfigurationError, DivergenceError, NumericalError
from .linearization import jacobian_linear_model, paper_linear_model
from .sim import SimConfig, integrate_linear, ise_fitness

DEFAULT_BOUNDS = SearchBounds([0.01, 0.1], [1.5, 5.0], names=("zeta", "omega_n"))


def design_model(params, plant="jacobian", delay=0.0, delay_convention="stable"):
    """Open-loop linear model used for synthesis, Pade-augmented when ``delay > 0``."""
    if plant == "jacobian":
        model = jacobian_linear_model(params)
    elif plant == "paper":
        model = paper_linear_model(params)
    else:
        raise ConfigurationError(f"scenario.plant must be 'jacobian' or 'paper', got {plant!r}")
    if delay > 0:
        model = pade_augment(model, delay, delay_convention)
    elif delay < 0:
        raise ConfigurationError(f"scenario.delay must be >= 0, got {delay!r}")
    return model


class DesignObjective:
    """Fitness of a ``(zeta, omega_n)`` point: ISE of the linear closed loop.

    Unstable designs score ``PENALTY + spectral_abscissa``; failed syntheses
    and diverged simulations score ``PENALTY``. Picklable, so it can be sent
    to worker processes.
    """

    def __init__(self, model, sim_config, weights=(1.0, 1.0, 1.0), delay_pole="pade"):
        self.model = model
        self.sim_config = sim_config
        self.weights = weights
        self.delay_pole = delay_pole

    def controller(self, point):
        zeta, omega_n = point
        return PolePlacementController(zeta, omega_n, delay_pole=self.delay_pole,
                                       reference=self.sim_config.reference).fit(self.model)

    def __call__(self, point):
        try:
            ctrl = self.controller(point)
        except (NumericalError, ConfigurationError):
            return PENALTY
        if ctrl.spectral_abscissa_ >= 0:
            return PENALTY + ctrl.spectral_abscissa_
        try:
            traj = integrate_linear(ctrl.closed_loop_, self.sim_config)
        except DivergenceError:
            return PENALTY
        return ise_fitness(traj, self.sim_config.reference, self.weights)


class BatTunedController(BaseEstimator):
    """Pole-placement controller whose (zeta, omega_n) are tuned by the bat algorithm.

    ``fit`` takes :class:`PhysicalParams`, builds the (delay-augmented) design
    model and minimises the closed-loop ISE over ``bounds``. ``predict`` maps
    states to cart forces with the tuned gain.
    """

    def __init__(self, delay=0.0, bounds=DEFAULT_BOUNDS, bat=BatConfig(), sim=None,
                 weights=(1.0, 1.0, 1.0), plant="jacobian", delay_convention="stable",
                 delay_pole="pade"):
        self.delay = delay
        self.bounds = bounds
        self.bat = bat
        self.sim = sim
        self.weights = weights
        self.plant = plant
        self.delay_convention = delay_convention
        self.delay_pole = delay_pole

    def fit(self, params=None, y=None, evaluate=None):
        params = PhysicalParams() if params is None else params
        sim = SimConfig() if self.sim is None else self.sim
        self.model_ = design_model(params, self.plant, float(self.delay), self.delay_convention)
        self.objective_ = DesignObjective(self.model_, sim, self.weights, self.delay_pole)
        self.result_ = optimize(self.objective_, self.bounds, self.bat, evaluate=evaluate)
        self.zeta_, self.omega_n_ = (float(v) for v in self.result_.best_point)
        self.controller_ = self.objective_.controller(self.result_.best_point)
        self.gain_ = self.controller_.gain_
        self.applied_gain_ = self.controller_.applied_gain_
        self.spectral_abscissa_ = self.controller_.spectral_abscissa_
        self.n_features_in_ = self.model_.order
        return self

    def predict(self, X):
        check_is_fitted(self, "controller_")
        return self.controller_.predict(X)

    def score(self, X=None, y=None):
        """Negative best fitness, so larger is better as sklearn expects."""
        check_is_fitted(self, "result_")
        return -self.result_.best_fitness
