"""Small input-validation helpers shared by the public entry points."""

import numbers

import numpy as np

from .exceptions import DimensionMismatchError


def as_float_array(x, name="array", ndim=None):
    """Convert to a float64 ndarray and reject non-finite entries."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if ndim is not None and arr.ndim != ndim:
        raise DimensionMismatchError(
            f"{name} must be {ndim}-dimensional, got shape {arr.shape}"
        )
    return arr


def check_points(manifold, X, name="X"):
    """Validate a batch of points, shape (n, ambient_dim), against a manifold."""
    X = as_float_array(X, name)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != manifold.ambient_dim:
        raise DimensionMismatchError(
            f"{name} must have shape (n, {manifold.ambient_dim}) for {manifold}, "
            f"got {X.shape}"
        )
    for row in X:
        manifold.check_point(row)
    return X


def check_weights(weights, n, name="weights"):
    """Validate sample weights; returns weights normalized to sum one."""
    if weights is None:
        return np.full(n, 1.0 / n)
    w = as_float_array(weights, name, ndim=1)
    if w.shape[0] != n:
        raise DimensionMismatchError(f"{name} must have length {n}, got {w.shape[0]}")
    if np.any(w < 0):
        raise ValueError(f"{name} must be non-negative")
    total = w.sum()
    if total <= 0:
        raise ValueError(f"{name} must not sum to zero")
    if abs(total - 1.0) <= 1e-12:
        # already normalized; dividing again would perturb the last bits and
        # break exact-reproducibility between call paths
        return w
    return w / total


def check_covariance(cov, dim, name="cov", atol=1e-9):
    """Validate a covariance matrix: shape (dim, dim), symmetric within atol."""
    cov = as_float_array(cov, name, ndim=2)
    if cov.shape != (dim, dim):
        raise DimensionMismatchError(
            f"{name} must have shape ({dim}, {dim}), got {cov.shape}"
        )
    if np.abs(cov - cov.T).max() > atol:
        raise ValueError(f"{name} is not symmetric within {atol}")
    return 0.5 * (cov + cov.T)


def check_positive(value, name, strict=True):
    if not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number")
    if strict and value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    if not strict and value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return float(value)
