"""Small-signal state-space models of the pendulum about the upright equilibrium.

Two models live here. ``paper_linear_model`` evaluates the published closed-form
coefficient block verbatim. ``jacobian_linear_model`` differentiates the
nonlinear equations of motion numerically. They are not expected to agree
exactly; ``model_discrepancy`` measures how far apart they are.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_matrix, check_positive, check_vector
from .dynamics import N_STATES, nonlinear_derivative, total_mass
from .exceptions import ConfigurationError, DegenerateParametersError


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Dense single-input model ``xdot = A x + B u``, ``y = C x + D u``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray = None
    D: np.ndarray = None

    def __post_init__(self):
        A = check_matrix(self.A, "A")
        n = A.shape[0]
        if A.shape != (n, n):
            raise ConfigurationError(f"A must be square, got shape {A.shape}")
        B = check_matrix(np.reshape(self.B, (n, -1)) if np.size(self.B) == n else self.B,
                         "B", shape=(n, None))
        C = np.eye(n) if self.C is None else check_matrix(self.C, "C", shape=(None, n))
        D = (np.zeros((C.shape[0], B.shape[1])) if self.D is None
             else check_matrix(self.D, "D", shape=(C.shape[0], B.shape[1])))
        for name, value in zip("ABCD", (A, B, C, D)):
            value = value.copy()
            value.flags.writeable = False
            object.__setattr__(self, name, value)

    @property
    def order(self):
        return self.A.shape[0]

    def with_matrices(self, **changes):
        values = dict(A=self.A, B=self.B, C=self.C, D=self.D)
        values.update(changes)
        return StateSpaceModel(**values)


class PCoefficients(NamedTuple):
    p1: float
    p2: float
    p3: float
    p4: float
    p5: float
    den: float


def p_coefficients(params):
    """Composite mass-length products and the common denominator.

    ``M`` in the denominator is the total mass (cart plus both links).
    """
    m1, m2 = params.link1_mass, params.link2_mass
    L1, L2 = params.link1_length, params.link2_length
    M = total_mass(params)
    p1 = (m1 + 2 * m2) * L1
    p2 = m2 * L2
    p3 = 2 * m2 * L1 * L2
    p4 = (m1 + 4 * m2) * L1 * L2
    p5 = m2 * L1 * L1
    terms = (M * p4 * p5, 2 * p1 * p2 * p3, -p2 * p2 * p4, -M * p3 * p3, -p1 * p1 * p5)
    den = sum(terms)
    if abs(den) <= 64 * np.finfo(float).eps * max(abs(t) for t in terms):
        raise DegenerateParametersError(f"coefficient denominator vanishes (Den={den!r})")
    return PCoefficients(p1, p2, p3, p4, p5, den)


def paper_linear_model(params):
    """Six-state model built from the closed-form coefficient formulas, C = I, D = 0."""
    p1, p2, p3, p4, p5, den = p_coefficients(params)
    M, g, f = total_mass(params), params.gravity, params.cart_friction
    A = np.zeros((N_STATES, N_STATES))
    A[0, 3] = A[1, 4] = A[2, 5] = 1.0
    A[3, 1] = (p2 * p3 - p1 * p5) * p1 * g / den
    A[3, 2] = (p1 * p3 + p2 * p4) * p2 * g / den
    A[3, 3] = -(p4 * p5 - p3 * p3) * f / den
    A[4, 1] = (M * p5 - p2 * p2) * p1 * g / den
    A[4, 2] = -(M * p3 - p1 * p2) * p2 * g / den
    A[4, 3] = -(p1 * p5 - p2 * p3) * f / den
    A[5, 1] = (M * p3 - p1 * p2) * p1 * g / den
    A[5, 2] = (M * p4 - p1 * p1) * p2 * g / den
    A[5, 3] = -(p1 * p3 + p2 * p4) * f / den
    B = np.zeros((N_STATES, 1))
    B[3, 0] = (p4 * p5 - p3 * p3) / den
    B[4, 0] = (p1 * p5 - p2 * p3) / den
    B[5, 0] = (p1 * p3 + p2 * p4) / den
    return StateSpaceModel(A, B)


def numeric_jacobian(params, operating_state=None, operating_force=0.0, step=1e-5):
    """Central-difference Jacobians ``(A, B)`` of the nonlinear derivative."""
    step = check_positive(step, "step")
    x0 = (np.zeros(N_STATES) if operating_state is None
          else check_vector(operating_state, "operating_state", N_STATES))
    F0 = float(operating_force)
    A = np.empty((N_STATES, N_STATES))
    for j in range(N_STATES):
        dx = np.zeros(N_STATES)
        dx[j] = step
        A[:, j] = (nonlinear_derivative(params, x0 + dx, F0)
                   - nonlinear_derivative(params, x0 - dx, F0)) / (2 * step)
    B = ((nonlinear_derivative(params, x0, F0 + step)
          - nonlinear_derivative(params, x0, F0 - step)) / (2 * step)).reshape(-1, 1)
    return A, B


def jacobian_linear_model(params, step=1e-3):
    """Upright linearization of the nonlinear dynamics, Richardson-extrapolated.

    Two central-difference passes at ``step`` and ``step / 2`` are combined so
    the leading O(h^2) truncation term cancels.
    """
    A1, B1 = numeric_jacobian(params, step=step)
    A2, B2 = numeric_jacobian(params, step=step / 2)
    A = (4 * A2 - A1) / 3
    B = (4 * B2 - B1) / 3
    # Rows 1-3 are the exact velocity selector; kill roundoff elsewhere in them.
    A[:3] = np.hstack([np.zeros((3, 3)), np.eye(3)])
    return StateSpaceModel(A, B)


def model_discrepancy(params):
    """Compare the closed-form model against the Jacobian model for ``params``."""
    paper = paper_linear_model(params)
    jac = jacobian_linear_model(params)
    dA = paper.A - jac.A
    dB = paper.B - jac.B
    scale_A = np.max(np.abs(jac.A[3:]))
    scale_B = np.max(np.abs(jac.B))
    return {
        "max_abs_diff_A": float(np.max(np.abs(dA))),
        "max_abs_diff_B": float(np.max(np.abs(dB))),
        "rel_diff_A": float(np.max(np.abs(dA)) / scale_A),
        "rel_diff_B": float(np.max(np.abs(dB)) / scale_B),
        "same_sparsity": bool(np.array_equal(paper.A != 0, jac.A != 0)),
        "eig_paper": [complex(z) for z in np.linalg.eigvals(paper.A)],
        "eig_jacobian": [complex(z) for z in np.linalg.eigvals(jac.A)],
        "A_paper": paper.A.tolist(),
        "B_paper": paper.B.ravel().tolist(),
        "A_jacobian": jac.A.tolist(),
        "B_jacobian": jac.B.ravel().tolist(),
    }
