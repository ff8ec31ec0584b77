"""Input validation helpers shared by the estimators and the functional API."""

import numbers

import numpy as np

from .exceptions import ConfigurationError


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real) or not np.isfinite(value):
        raise ConfigurationError(f"{name} must be a finite real number, got {value!r}")
    if strict and value <= 0:
        raise ConfigurationError(f"{name} must be > 0, got {value!r}")
    if not strict and value < 0:
        raise ConfigurationError(f"{name} must be >= 0, got {value!r}")
    return float(value)


def check_vector(x, name="x", size=None):
    """Return ``x`` as a finite 1-D float array, optionally of length ``size``."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if size is not None and arr.shape[0] != size:
        raise ConfigurationError(f"{name} must have length {size}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    return arr


def check_matrix(M, name, shape=None):
    arr = np.atleast_2d(np.asarray(M, dtype=float))
    if arr.ndim != 2:
        raise ConfigurationError(f"{name} must be two-dimensional")
    if shape is not None:
        for got, want in zip(arr.shape, shape):
            if want is not None and got != want:
                raise ConfigurationError(f"{name} has shape {arr.shape}, expected {shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError(f"{name} contains non-finite entries")
    return arr


def check_states(X, n_states):
    """Validate a batch of state vectors, shape (n_samples, n_states)."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return check_matrix(arr, "X", shape=(None, n_states))
