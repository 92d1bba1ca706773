"""Hyperbolic space H^d, hyperboloid (upper sheet) model in R^{d+1}."""

import numpy as np

from ..exceptions import DegenerateInputError
from .base import Manifold

_ZERO_TOL = 1e-12


def minkowski_dot(a, b):
    """Bilinear form <a,b> = sum_i<last a_i b_i - a_last b_last."""
    return float(np.dot(a[:-1], b[:-1]) - a[-1] * b[-1])


class Hyperbolic(Manifold):
    """H^d = {x : <x,x>_M = -1, x_last > 0} with the Minkowski-induced metric.

    The space is complete with no cut locus, so log and transport are
    globally defined.
    """

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)
        self.ambient_dim = int(dim) + 1

    def origin(self):
        e = np.zeros(self.ambient_dim)
        e[-1] = 1.0
        return e

    def exp(self, x, u):
        x = self._check_shape(x)
        u = self._check_shape(u, "tangent")
        sq = minkowski_dot(u, u)
        norm = np.sqrt(max(sq, 0.0))  # tangents are spacelike
        if norm < _ZERO_TOL:
            return x.copy()
        return np.cosh(norm) * x + np.sinh(norm) * (u / norm)

    def log(self, x, y):
        x = self._check_shape(x)
        y = self._check_shape(y)
        c = max(-minkowski_dot(x, y), 1.0)
        d = float(np.arccosh(c))
        num = y + minkowski_dot(x, y) * x
        denom = np.sqrt(max(minkowski_dot(num, num), 0.0))
        # the residual, not arccosh of a rounded product, decides "same point"
        if denom < _ZERO_TOL:
            return np.zeros(self.ambient_dim)
        return d * num / denom

    def dist(self, x, y):
        c = max(-minkowski_dot(self._check_shape(x), self._check_shape(y)), 1.0)
        return float(np.arccosh(c))

    def inner(self, x, u, v):
        return minkowski_dot(np.asarray(u, float), np.asarray(v, float))

    def transport(self, g, h, u):
        fwd = self.log(g, h)
        d2 = minkowski_dot(fwd, fwd)
        if d2 < 1e-14:
            return np.asarray(u, dtype=float).copy()
        back = self.log(h, g)
        u = np.asarray(u, dtype=float)
        return u - (minkowski_dot(fwd, u) / d2) * (fwd + back)

    def chart_basis(self, x):
        # Lorentz reflection sending the origin (last canonical axis, which
        # lies on the sheet) onto x; the first dim canonical axes map to an
        # orthonormal tangent basis at x.
        x = self._check_shape(x)
        e = self.origin()
        w = e - x
        ww = minkowski_dot(w, w)
        if abs(ww) < _ZERO_TOL:
            return np.eye(self.ambient_dim)[: self.dim]
        J = np.ones(self.ambient_dim)
        J[-1] = -1.0
        H = np.eye(self.ambient_dim) - 2.0 * np.outer(w, J * w) / ww
        return H[:, : self.dim].T

    def project(self, x):
        x = self._check_shape(x)
        sq = minkowski_dot(x, x)
        if sq >= 0:
            raise DegenerateInputError(
                "array is not timelike; cannot rescale onto the hyperboloid"
            )
        y = x / np.sqrt(-sq)
        if y[-1] < 0:
            y = -y
        return y

    def check_point(self, x, atol=1e-9):
        x = self._check_shape(x)
        if abs(minkowski_dot(x, x) + 1.0) > atol:
            raise ValueError(f"point is off the hyperboloid by more than {atol}")
        if x[-1] <= 0:
            raise ValueError("point is on the lower sheet of the hyperboloid")

    def random_point(self, rng, scale=1.0):
        coords = scale * rng.standard_normal(self.dim)
        return self.exp_coords(self.origin(), coords)

    def spec_string(self):
        return f"hyperbolic:{self.dim}"
