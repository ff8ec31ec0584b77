"""First-order Pade approximation of a measurement delay on the cart position."""

import numpy as np

from ._validation import check_positive
from .exceptions import ConfigurationError
from .linearization import StateSpaceModel

DELAYED_CHANNEL = 0  # cart position


def pade_response(delay, omega):
    """Frequency response of ``(1 - s*delay/2) / (1 + s*delay/2)`` at ``s = j*omega``.

    Accepts scalar or array ``omega``.
    """
    delay = check_positive(delay, "delay", strict=False)
    s = 1j * np.asarray(omega, dtype=float)
    half = s * delay / 2
    out = (1 - half) / (1 + half)
    return complex(out) if out.ndim == 0 else out


def pade_augment(model, delay, convention="stable"):
    """Append the Pade lag state ``x7`` driven by the cart position.

    With the default ``"stable"`` convention::

        x7' = -(2/delay) x7 + (4/delay) x1,    x_m = x7 - x1

    where ``x_m`` is the delayed cart position, reported as output 7.
    ``convention="paper"`` uses the published matrix row literally
    (``x7' = (2/delay) x7 - (4/delay) x1``), whose diagonal entry is an
    unstable pole; it exists only for comparison runs.
    """
    if not np.isfinite(delay) or delay <= 0:
        raise ConfigurationError(f"delay must be > 0 for augmentation, got {delay!r}")
    if convention not in ("stable", "paper"):
        raise ConfigurationError(f"unknown delay convention {convention!r}")
    n = model.order
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = model.A
    sign = 1.0 if convention == "stable" else -1.0
    A[n, n] = -sign * 2.0 / delay
    A[n, DELAYED_CHANNEL] = sign * 4.0 / delay
    B = np.vstack([model.B, np.zeros((1, model.B.shape[1]))])
    C = np.zeros((model.C.shape[0] + 1, n + 1))
    C[:-1, :n] = model.C
    C[-1, n] = 1.0
    C[-1, DELAYED_CHANNEL] = -1.0
    D = np.vstack([model.D, np.zeros((1, model.D.shape[1]))])
    return StateSpaceModel(A, B, C, D)


def equilibrium_offset(order, reference):
    """State at which the (possibly augmented) plant rests with the cart at ``reference``."""
    x = np.zeros(order)
    x[DELAYED_CHANNEL] = reference
    if order == 7:
        x[6] = 2.0 * reference
    return x
