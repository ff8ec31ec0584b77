"""Fast invariant checks runnable from the command line (``dipbat selftest``)."""

import math

import numpy as np

from .control import closed_loop, place_poles, poles_from_spec
from .delay import pade_response
from .dynamics import PhysicalParams, nonlinear_derivative, total_energy
from .linearization import StateSpaceModel, p_coefficients, paper_linear_model
from .sim import SimConfig, integrate_linear, integrate_nonlinear


def _equilibria():
    p = PhysicalParams()
    worst = max(np.max(np.abs(nonlinear_derivative(p, [0, a, b, 0, 0, 0], 0.0)))
                for a in (0.0, math.pi) for b in (0.0, math.pi))
    return worst < 1e-12, f"max |derivative| = {worst:.3g}"


def _p_coefficients():
    unit = PhysicalParams(1, 1, 1, 1, 1, gravity=10.0, cart_friction=0.0)
    pc = p_coefficients(unit)
    a42 = paper_linear_model(unit).A[3, 1]
    ok = np.allclose(pc, (3, 1, 2, 5, 1, 1), atol=1e-12, rtol=0) and abs(a42 + 30) < 1e-12
    return ok, f"p = {tuple(round(v, 12) for v in pc)}, A42 = {a42:.12g}"


def _pade():
    w = np.logspace(-3, 3, 61)
    err = max(np.max(np.abs(np.abs(pade_response(g, w)) - 1)) for g in (0.02, 0.2, 2.0))
    return err < 1e-12, f"max ||G| - 1| = {err:.3g}"


def _placement():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(2, 8))
        model = StateSpaceModel(rng.normal(size=(n, n)), rng.normal(size=(n, 1)))
        poles = poles_from_spec(rng.uniform(0.3, 0.9), rng.uniform(0.5, 3), n)
        K = place_poles(model, poles)
        got = np.linalg.eigvals(closed_loop(model, K).A)
        worst = max(worst, max(np.min(np.abs(got - p)) / abs(p) for p in poles))
    return worst < 1e-6, f"max relative pole error = {worst:.3g}"


def _integrator_order():
    model = StateSpaceModel([[-1.0, 2.0], [-2.0, -1.0]], [[0.0], [0.0]])
    x0 = np.array([1.0, 0.0])
    exact = math.exp(-1.0) * np.array([math.cos(2.0), -math.sin(2.0)])
    errs = [np.linalg.norm(integrate_linear(model, SimConfig(dt, 1.0, x0)).states[-1] - exact)
            for dt in (0.05, 0.025)]
    ratio = errs[0] / errs[1]
    return abs(ratio - 16) <= 2, f"error ratio = {ratio:.3f}"


def _energy():
    p = PhysicalParams(cart_friction=0.0)
    traj = integrate_nonlinear(p, np.zeros(6), SimConfig(dt=1e-3, horizon=1.0))
    e = [total_energy(p, x) for x in traj.states]
    drift = max(abs(v - e[0]) for v in e) / abs(e[0])
    return drift < 1e-6, f"relative energy drift over 1 s = {drift:.3g}"


CHECKS = {
    "equilibria": _equilibria,
    "p_coefficients": _p_coefficients,
    "pade_all_pass": _pade,
    "pole_placement": _placement,
    "integrator_order": _integrator_order,
    "energy_conservation": _energy,
}


def run_selftest():
    """Run every check; return a list of ``(name, passed, detail)``."""
    results = []
    for name, check in CHECKS.items():
        try:
            ok, detail = check()
        except Exception as exc:  # report, don't abort the remaining checks
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
