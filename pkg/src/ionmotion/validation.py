"""Input validation helpers shared by the library and the estimators."""

import math

import numpy as np

from .errors import DomainError


def check_finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(value, name):
    value = check_finite(value, name)
    if value <= 0:
        raise DomainError(f"{name} must be > 0, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = check_finite(value, name)
    if value < 0:
        raise DomainError(f"{name} must be >= 0, got {value!r}")
    return value


def check_grid(grid, name="grid"):
    """Return ``grid`` as a 1-D float array; must be non-empty, finite, strictly monotone."""
    x = np.asarray(grid, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1 or x.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(x)):
        raise DomainError(f"{name} contains non-finite values")
    if x.size > 1:
        d = np.diff(x)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise DomainError(f"{name} must be strictly monotone")
    return x


def check_scan_arrays(x, p, sigma=None):
    """Validate a (x, p, sigma) triple; ``sigma`` defaults to zeros."""
    x = np.asarray(x, dtype=float).ravel()
    p = np.asarray(p, dtype=float).ravel()
    if sigma is None:
        sigma = np.zeros_like(p)
    sigma = np.asarray(sigma, dtype=float).ravel()
    if not (x.shape == p.shape == sigma.shape):
        raise DomainError(
            f"x, p, sigma must have equal lengths, got {x.size}, {p.size}, {sigma.size}"
        )
    if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
        raise DomainError("probabilities must lie in [0, 1]")
    if np.any(sigma < 0) or not np.all(np.isfinite(sigma)):
        raise DomainError("sigma must be finite and >= 0")
    return x, p, sigma
