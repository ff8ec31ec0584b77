"""Fixed-step RK4 simulation of linear and nonlinear closed loops, plus fitness metrics."""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_positive, check_vector
from .delay import DELAYED_CHANNEL, equilibrium_offset
from .dynamics import N_STATES, STATE_NAMES, _accelerations, _coefficients
from .exceptions import ConfigurationError, DivergenceError

from .bat import PENALTY
DEFAULT_THETA1 = math.radians(3.0)
_BLOWUP = 1e150
_BLOCK = 64


@dataclass
class SimConfig:
    dt: float = 1e-3
    horizon: float = 20.0
    initial_state: np.ndarray = field(
        default_factory=lambda: np.array([0.0, DEFAULT_THETA1, 0.0, 0.0, 0.0, 0.0]))
    reference: float = 0.0

    def __post_init__(self):
        self.dt = check_positive(self.dt, "sim.dt")
        self.horizon = check_positive(self.horizon, "sim.horizon")
        if self.horizon < self.dt:
            raise ConfigurationError("sim.horizon must be >= sim.dt")
        self.initial_state = check_vector(self.initial_state, "sim.initial_state")
        self.reference = float(self.reference)

    @property
    def n_steps(self):
        return int(round(self.horizon / self.dt))

    def initial_state_for(self, order):
        """Initial state padded to ``order``; a Pade state starts at rest (x7 = 2 x1)."""
        x0 = self.initial_state
        if x0.size == order:
            return x0.copy()
        if x0.size == N_STATES and order == N_STATES + 1:
            return np.append(x0, 2.0 * x0[DELAYED_CHANNEL])
        raise ConfigurationError(
            f"sim.initial_state has {x0.size} entries, model has order {order}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    inputs: np.ndarray

    def __post_init__(self):
        if not (len(self.times) == len(self.states) == len(self.inputs)):
            raise ConfigurationError("trajectory arrays must have equal length")

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def columns(self):
        names = list(STATE_NAMES[: min(self.states.shape[1], N_STATES)])
        names += [f"x{i + 1}" for i in range(N_STATES, self.states.shape[1])]
        return ["t", *names, "u"]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.columns())
            for t, x, u in zip(self.times, self.states, self.inputs):
                writer.writerow([repr(float(t)), *(repr(float(v)) for v in x), repr(float(u))])


def rk4_transition(A, dt):
    """One classical RK4 step of ``xdot = A x`` collapsed into a single matrix."""
    hA = dt * np.asarray(A, dtype=float)
    n = hA.shape[0]
    term = np.eye(n)
    phi = np.eye(n)
    for k in range(1, 5):
        term = term @ hA / k
        phi = phi + term
    return phi


def integrate_linear(model, config, gain=None):
    """Integrate the autonomous loop ``xdot = A x`` with fixed-step RK4.

    States are propagated as deviations from the equilibrium that puts the
    cart at ``config.reference`` (the pendulum plant rests at any cart
    position, so the closed loop acts on the deviation unchanged). ``gain`` (the feedback row actually applied)
    only feeds the recorded input ``u = -gain (x - x_eq)``.
    """
    n = model.order
    x_eq = equilibrium_offset(n, config.reference) if n in (N_STATES, N_STATES + 1) else np.zeros(n)
    phi = rk4_transition(model.A, config.dt)
    steps = config.n_steps
    e = np.empty((steps + 1, n))
    e[0] = config.initial_state_for(n) - x_eq
    # Advance in blocks: rows k = 1..B of a block are e_start @ (phi^k)^T.
    block = min(steps, _BLOCK)
    powers = np.empty((block, n, n))
    powers[0] = phi.T
    for k in range(1, block):
        powers[k] = powers[k - 1] @ phi.T
    stacked = powers.transpose(1, 0, 2).reshape(n, block * n)
    with np.errstate(over="ignore", invalid="ignore"):
        for start in range(0, steps, block):
            m = min(block, steps - start)
            e[start + 1:start + 1 + m] = (e[start] @ stacked[:, : m * n]).reshape(m, n)
            bad = ~np.all(np.abs(e[start + 1:start + 1 + m]) < _BLOWUP, axis=1)
            if np.any(bad):
                t = (start + 1 + int(np.argmax(bad))) * config.dt
                raise DivergenceError(f"linear simulation diverged at t={t:.6g} s", time=t)
    times = np.arange(steps + 1) * config.dt
    inputs = np.zeros(steps + 1) if gain is None else -(e @ check_vector(gain, "gain", n))
    return Trajectory(times, e + x_eq, inputs)


def integrate_nonlinear(params, K, config, delay=0.0, delay_convention="stable"):
    """Integrate the nonlinear plant under ``F = -K (x - x_eq)`` with fixed-step RK4.

    A 6-entry ``K`` feeds back the true state. A 7-entry ``K`` is the applied
    gain of a delayed loop: the Pade state ``x7`` is integrated alongside the
    plant and ``delay`` must be positive.
    """
    K = check_vector(K, "K")
    if K.size == N_STATES + 1:
        if not delay > 0:
            raise ConfigurationError("a 7-state gain needs a positive delay")
        sign = 1.0 if delay_convention == "stable" else -1.0
        a77, a71 = -sign * 2.0 / delay, sign * 4.0 / delay
    elif K.size != N_STATES:
        raise ConfigurationError(f"K must have 6 or 7 entries, got {K.size}")
    n = K.size
    coef = _coefficients(params)
    x_eq = equilibrium_offset(n, config.reference)
    k = [float(v) for v in K]
    ref = [float(v) for v in x_eq]

    def force(s):
        return -sum(k[i] * (s[i] - ref[i]) for i in range(n))

    def deriv(s):
        F = force(s)
        acc = _accelerations(coef, s[1], s[2], s[3], s[4], s[5], F)
        d = [s[3], s[4], s[5], acc[0], acc[1], acc[2]]
        if n == 7:
            d.append(a77 * s[6] + a71 * s[0])
        return d

    dt = config.dt
    steps = config.n_steps
    out = np.empty((steps + 1, n))
    s = [float(v) for v in config.initial_state_for(n)]
    out[0] = s
    h2 = dt / 2
    r = range(n)
    for step in range(steps):
        k1 = deriv(s)
        k2 = deriv([s[i] + h2 * k1[i] for i in r])
        k3 = deriv([s[i] + h2 * k2[i] for i in r])
        k4 = deriv([s[i] + dt * k3[i] for i in r])
        s = [s[i] + dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) for i in r]
        if not all(abs(v) < _BLOWUP for v in s):
            t = (step + 1) * dt
            raise DivergenceError(f"nonlinear simulation diverged at t={t:.6g} s", time=t)
        out[step + 1] = s
    times = np.arange(steps + 1) * dt
    inputs = -((out - x_eq) @ K)
    return Trajectory(times, out, inputs)


def ise_fitness(traj, reference=0.0, weights=(1.0, 1.0, 1.0)):
    """Weighted integral of squared cart-position and link-angle errors (left Riemann sum)."""
    w = check_vector(weights, "weights", 3)
    if np.any(w < 0):
        raise ConfigurationError("fitness weights must be non-negative")
    if len(traj.times) < 2:
        return 0.0
    X = traj.states[:-1, :3]
    if not np.all(np.isfinite(X)):
        return PENALTY
    err = X - np.array([reference, 0.0, 0.0])
    return float(traj.dt * np.sum(err**2 @ w))


def settling_time(traj, band=0.02, reference=0.0, floor=1e-12):
    """Time after which the state deviation norm stays within ``band`` of its initial size.

    Returns ``None`` when the trajectory ends outside the band.
    """
    band = check_positive(band, "band")
    n = traj.states.shape[1]
    x_eq = equilibrium_offset(n, reference) if n in (N_STATES, N_STATES + 1) else np.zeros(n)
    norms = np.linalg.norm(traj.states - x_eq, axis=1)
    limit = band * max(norms[0], floor)
    outside = np.flatnonzero(~(norms <= limit))
    if outside.size == 0:
        return float(traj.times[0])
    last = outside[-1]
    if last == len(norms) - 1:
        return None
    return float(traj.times[last + 1])
