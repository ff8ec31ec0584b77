"""Full-state feedback synthesis from a (damping factor, natural frequency) design point."""

import numpy as np
from scipy.linalg import matrix_balance
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive, check_states, check_vector
from .delay import DELAYED_CHANNEL, equilibrium_offset
from .exceptions import ConfigurationError, NumericalError, SynthesisError
from .linearization import StateSpaceModel

RANK_TOL = 1e-9


def poles_from_spec(zeta, omega_n, order):
    """Dominant second-order pair plus ``order - 2`` faster real poles.

    The extra poles sit at ``-(k + 2) * zeta * omega_n`` for ``k = 1 .. order-2``.
    """
    zeta = check_positive(zeta, "zeta")
    omega_n = check_positive(omega_n, "omega_n")
    if order < 2:
        raise ConfigurationError(f"order must be >= 2, got {order}")
    sigma = zeta * omega_n
    if zeta < 1:
        wd = omega_n * np.sqrt(1 - zeta**2)
        poles = [complex(-sigma, wd), complex(-sigma, -wd)]
    else:
        root = np.sqrt(zeta**2 - 1)
        poles = [complex(-omega_n * (zeta - root)), complex(-omega_n * (zeta + root))]
    poles += [complex(-(k + 2) * sigma) for k in range(1, order - 1)]
    return np.array(poles)


def controllability_matrix(model):
    A, b = model.A, model.B[:, 0]
    cols = [b]
    for _ in range(model.order - 1):
        cols.append(A @ cols[-1])
    return np.column_stack(cols)


def controllability_rank(model, tol=RANK_TOL):
    """Numerical rank of ``[B, AB, ..., A^(n-1) B]``.

    Each Krylov column is normalised first, which leaves the rank unchanged
    but keeps widely spread plant time scales from swamping the threshold.
    Singular values below ``tol`` times the largest count as zero.
    """
    C = controllability_matrix(model)
    norms = np.linalg.norm(C, axis=0)
    if not np.any(norms > 0):
        return 0
    C = C[:, norms > 0] / norms[norms > 0]
    s = np.linalg.svd(C, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


def _check_pole_set(poles, n):
    poles = np.asarray(poles, dtype=complex).ravel()
    if poles.size != n:
        raise ConfigurationError(f"expected {n} poles, got {poles.size}")
    if not np.all(np.isfinite(poles)):
        raise ConfigurationError("poles must be finite")
    remaining = list(poles)
    while remaining:
        p = remaining.pop(0)
        if abs(p.imag) <= 1e-12 * max(1.0, abs(p)):
            continue
        dists = [abs(q - p.conjugate()) for q in remaining]
        if not dists or min(dists) > 1e-9 * max(1.0, abs(p)):
            raise ConfigurationError(f"pole set is not closed under conjugation (no partner for {p})")
        remaining.pop(int(np.argmin(dists)))
    return poles


def place_poles(model, poles):
    """Single-input pole placement by Ackermann's formula on a balanced realization.

    Returns the gain row ``K`` such that ``eig(A - B K)`` equals ``poles``.
    """
    if model.B.shape[1] != 1:
        raise ConfigurationError("place_poles handles single-input models only")
    n = model.order
    poles = _check_pole_set(poles, n)
    if controllability_rank(model) < n:
        raise SynthesisError("model is not controllable; poles cannot be placed")

    # Similarity-balance A so the Krylov basis is better conditioned:
    # Ab = T^-1 A T, Bb = T^-1 B, and K = Kb T^-1.
    Ab, T = matrix_balance(model.A, permute=False)
    t = np.diag(T)
    bb = model.B[:, 0] / t
    C = np.column_stack([np.linalg.matrix_power(Ab, k) @ bb for k in range(n)])
    coeffs = np.real(np.poly(poles))
    phi = np.zeros((n, n))
    for c in coeffs:
        phi = phi @ Ab + c * np.eye(n)
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    try:
        row = np.linalg.solve(C.T, e_n)
    except np.linalg.LinAlgError as exc:
        raise SynthesisError(f"controllability matrix is singular: {exc}") from exc
    K = (row @ phi) / t
    if not np.all(np.isfinite(K)):
        raise SynthesisError("pole placement produced non-finite gains")
    return K


def substitute_gain(K, order):
    """Rewire ``K``'s cart-position entry onto the delayed measurement ``x7 - x1``.

    ``u = -K1 (x7 - x1) - K2 x2 ... - K7 x7`` is the same as ``u = -Kt x`` with
    ``Kt = K`` except ``Kt1 = -K1`` and ``Kt7 = K7 + K1``.
    """
    K = check_vector(K, "K", order)
    if order != 7:
        raise ConfigurationError("delayed-channel substitution needs a 7-state gain")
    Kt = K.copy()
    Kt[DELAYED_CHANNEL] = -K[DELAYED_CHANNEL]
    Kt[6] = K[6] + K[DELAYED_CHANNEL]
    return Kt


def closed_loop(model, K, delayed_channel_substitution=False):
    """Autonomous model ``A - B Kt`` where ``Kt`` is ``K``, rewired when flagged."""
    K = check_vector(K, "K")
    if K.size != model.order:
        raise ConfigurationError(f"gain has {K.size} entries, model has order {model.order}")
    if delayed_channel_substitution:
        K = substitute_gain(K, model.order)
    A_cl = model.A - model.B[:, :1] @ K.reshape(1, -1)
    return StateSpaceModel(A_cl, np.zeros((model.order, 1)), model.C,
                           np.zeros((model.C.shape[0], 1)))


def spectral_abscissa(A):
    try:
        eig = np.linalg.eigvals(np.asarray(A, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    return float(np.max(eig.real))


def is_stable(model):
    """Return ``(stable, spectral_abscissa)``."""
    alpha = spectral_abscissa(model.A)
    return alpha < 0, alpha


class PolePlacementController(BaseEstimator):
    """State-feedback controller parameterised by damping factor and natural frequency.

    ``fit`` takes the open-loop :class:`StateSpaceModel` and places all of its
    poles. On a 7-state (Pade-augmented) model the seventh pole is, by default
    (``delay_pole="pade"``), left at the lag filter's own pole ``-2/delay``;
    ``delay_pole="spaced"`` instead continues the :func:`poles_from_spec`
    spacing. When ``delayed_feedback`` is set and the model carries the Pade
    state, the cart-position gain acts on the delayed measurement instead of
    the true position.

    Attributes set by ``fit``: ``poles_``, ``gain_`` (as designed),
    ``applied_gain_`` (after rewiring), ``closed_loop_``,
    ``spectral_abscissa_``, ``n_features_in_``.
    """

    def __init__(self, zeta=0.7, omega_n=1.0, delayed_feedback=True, delay_pole="pade",
                 reference=0.0):
        self.zeta = zeta
        self.omega_n = omega_n
        self.delayed_feedback = delayed_feedback
        self.delay_pole = delay_pole
        self.reference = reference

    def _design_poles(self, model):
        if model.order != 7 or self.delay_pole == "spaced":
            return poles_from_spec(self.zeta, self.omega_n, model.order)
        if self.delay_pole != "pade":
            raise ConfigurationError(f"unknown delay_pole {self.delay_pole!r}")
        lag_pole = -abs(model.A[6, 6])
        return np.append(poles_from_spec(self.zeta, self.omega_n, 6), lag_pole)

    def fit(self, model, y=None):
        if not isinstance(model, StateSpaceModel):
            raise ConfigurationError("fit expects a StateSpaceModel")
        substitute = bool(self.delayed_feedback) and model.order == 7
        self.poles_ = self._design_poles(model)
        self.gain_ = place_poles(model, self.poles_)
        self.applied_gain_ = substitute_gain(self.gain_, 7) if substitute else self.gain_.copy()
        self.closed_loop_ = closed_loop(model, self.gain_, substitute)
        self.spectral_abscissa_ = spectral_abscissa(self.closed_loop_.A)
        self.n_features_in_ = model.order
        return self

    def predict(self, X):
        """Cart force for each row of ``X`` (absolute states, shape (n, order))."""
        check_is_fitted(self, "applied_gain_")
        X = check_states(X, self.n_features_in_)
        offset = equilibrium_offset(self.n_features_in_, float(self.reference))
        return -(X - offset) @ self.applied_gain_

    @property
    def is_stable_(self):
        check_is_fitted(self, "spectral_abscissa_")
        return self.spectral_abscissa_ < 0
