"""Cart plus two-link pendulum: parameters, energies and nonlinear equations of motion.

State ordering is ``[x_c, theta1, theta2, xdot_c, theta1dot, theta2dot]``; both
angles are measured from the upward vertical.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from ._validation import check_positive, check_vector
from .exceptions import ConfigurationError, NumericalError

N_STATES = 6
STATE_NAMES = ("x_c", "theta1", "theta2", "xdot_c", "theta1dot", "theta2dot")


@dataclass(frozen=True)
class PhysicalParams:
    """Physical constants of the cart and both links.

    ``link*_com`` is the pivot-to-centre-of-mass distance and ``link*_inertia``
    the moment of inertia about the centre of mass. Left as ``None`` they
    default to a uniform thin rod (``L/2`` and ``m L**2 / 12``).
    """

    cart_mass: float = 1.0
    link1_mass: float = 0.5
    link2_mass: float = 0.5
    link1_length: float = 0.5
    link2_length: float = 0.5
    link1_com: float = field(default=None)
    link2_com: float = field(default=None)
    link1_inertia: float = field(default=None)
    link2_inertia: float = field(default=None)
    cart_friction: float = 0.1
    gravity: float = 9.81

    def __post_init__(self):
        for name in ("cart_mass", "link1_mass", "link2_mass", "link1_length",
                     "link2_length", "gravity"):
            check_positive(getattr(self, name), f"params.{name}")
        check_positive(self.cart_friction, "params.cart_friction", strict=False)
        for i in (1, 2):
            mass = getattr(self, f"link{i}_mass")
            length = getattr(self, f"link{i}_length")
            if getattr(self, f"link{i}_com") is None:
                object.__setattr__(self, f"link{i}_com", length / 2.0)
            if getattr(self, f"link{i}_inertia") is None:
                object.__setattr__(self, f"link{i}_inertia", mass * length**2 / 12.0)
            com = check_positive(getattr(self, f"link{i}_com"), f"params.link{i}_com")
            check_positive(getattr(self, f"link{i}_inertia"), f"params.link{i}_inertia",
                           strict=False)
            if com > length:
                raise ConfigurationError(
                    f"params.link{i}_com ({com}) exceeds params.link{i}_length ({length})")

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return PhysicalParams(**values)

    def as_dict(self):
        return asdict(self)


class PlantState(NamedTuple):
    x_c: float = 0.0
    theta1: float = 0.0
    theta2: float = 0.0
    xdot_c: float = 0.0
    theta1dot: float = 0.0
    theta2dot: float = 0.0

    def to_array(self):
        return np.array(self, dtype=float)


def total_mass(params):
    return params.cart_mass + params.link1_mass + params.link2_mass


def kinetic_energy(params, state):
    x, th1, th2, xd, th1d, th2d = check_vector(state, "state", N_STATES)
    p = params
    c1, s1, c2, s2 = math.cos(th1), math.sin(th1), math.cos(th2), math.sin(th2)
    cart = 0.5 * p.cart_mass * xd**2
    link1 = (0.5 * p.link1_mass * ((xd + p.link1_com * th1d * c1)**2
                                   + (p.link1_com * th1d * s1)**2)
             + 0.5 * p.link1_inertia * th1d**2)
    vx2 = xd + p.link1_length * th1d * c1 + p.link2_com * th2d * c2
    vy2 = p.link1_length * th1d * s1 + p.link2_com * th2d * s2
    link2 = 0.5 * p.link2_mass * (vx2**2 + vy2**2) + 0.5 * p.link2_inertia * th2d**2
    return cart + link1 + link2


def potential_energy(params, state):
    """Gravitational energy with the datum at pivot height."""
    _, th1, th2 = check_vector(state, "state", N_STATES)[:3]
    p = params
    return (p.link1_mass * p.gravity * p.link1_com * math.cos(th1)
            + p.link2_mass * p.gravity * (p.link1_length * math.cos(th1)
                                          + p.link2_com * math.cos(th2)))


def total_energy(params, state):
    return kinetic_energy(params, state) + potential_energy(params, state)


def mass_matrix(params, state):
    """Configuration-dependent 3x3 inertia matrix of ``(x_c, theta1, theta2)``."""
    th1, th2 = float(state[1]), float(state[2])
    p = params
    a = p.link1_mass * p.link1_com + p.link2_mass * p.link1_length
    b = p.link2_mass * p.link2_com
    c = p.link2_mass * p.link1_length * p.link2_com
    return np.array([
        [total_mass(p), a * math.cos(th1), b * math.cos(th2)],
        [a * math.cos(th1), p.link1_mass * p.link1_com**2 + p.link2_mass * p.link1_length**2
         + p.link1_inertia, c * math.cos(th1 - th2)],
        [b * math.cos(th2), c * math.cos(th1 - th2), p.link2_mass * p.link2_com**2
         + p.link2_inertia],
    ])


def _coefficients(p):
    a = p.link1_mass * p.link1_com + p.link2_mass * p.link1_length
    b = p.link2_mass * p.link2_com
    c = p.link2_mass * p.link1_length * p.link2_com
    m22 = p.link1_mass * p.link1_com**2 + p.link2_mass * p.link1_length**2 + p.link1_inertia
    m33 = p.link2_mass * p.link2_com**2 + p.link2_inertia
    return (total_mass(p), a, b, c, m22, m33, p.cart_friction, p.gravity)


def _accelerations(coef, th1, th2, xd, th1d, th2d, force):
    # Plain-float path: this sits in the innermost loop of the nonlinear integrator.
    m11, a, b, c, m22, m33, fric, g = coef
    c1, s1 = math.cos(th1), math.sin(th1)
    c2, s2 = math.cos(th2), math.sin(th2)
    c12, s12 = math.cos(th1 - th2), math.sin(th1 - th2)
    m12, m13, m23 = a * c1, b * c2, c * c12
    r1 = force - fric * xd + a * th1d**2 * s1 + b * th2d**2 * s2
    r2 = a * g * s1 - c * th2d**2 * s12
    r3 = b * g * s2 + c * th1d**2 * s12
    # Symmetric 3x3 solve by cofactors.
    k11 = m22 * m33 - m23 * m23
    k12 = m13 * m23 - m12 * m33
    k13 = m12 * m23 - m13 * m22
    k22 = m11 * m33 - m13 * m13
    k23 = m12 * m13 - m11 * m23
    k33 = m11 * m22 - m12 * m12
    det = m11 * k11 + m12 * k12 + m13 * k13
    if not det > 1e-14 * m11 * m22 * m33:
        raise NumericalError(f"mass matrix is singular (det={det!r}); parameters are non-physical")
    return ((k11 * r1 + k12 * r2 + k13 * r3) / det,
            (k12 * r1 + k22 * r2 + k23 * r3) / det,
            (k13 * r1 + k23 * r2 + k33 * r3) / det)


def nonlinear_derivative(params, state, force=0.0):
    """Time derivative of the full state under cart force ``force`` (N).

    Viscous cart friction ``-f * xdot_c`` acts alongside ``force``.
    """
    _, th1, th2, xd, th1d, th2d = check_vector(state, "state", N_STATES)
    acc = _accelerations(_coefficients(params), th1, th2, xd, th1d, th2d, float(force))
    return np.array([xd, th1d, th2d, *acc])
