"""Flat Euclidean space; the degenerate base case of every kernel."""

import numpy as np

from .base import Manifold


class Euclidean(Manifold):
    """R^d with the standard inner product. Charts are the canonical basis."""

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)
        self.ambient_dim = int(dim)

    def exp(self, x, u):
        return self._check_shape(x) + self._check_shape(u, "tangent")

    def log(self, x, y):
        return self._check_shape(y) - self._check_shape(x)

    def dist(self, x, y):
        return float(np.linalg.norm(self.log(x, y)))

    def inner(self, x, u, v):
        return float(np.dot(u, v))

    def transport(self, g, h, u):
        return np.asarray(u, dtype=float).copy()

    def transport_map(self, g, h):
        return np.eye(self.dim)

    def chart_basis(self, x):
        return np.eye(self.dim)

    def to_chart(self, x, u):
        return np.asarray(u, dtype=float).copy()

    def from_chart(self, x, coords):
        coords = np.asarray(coords, dtype=float)
        return coords.copy()

    def project(self, x):
        return self._check_shape(x).copy()

    def check_point(self, x, atol=1e-9):
        self._check_shape(x)

    def random_point(self, rng):
        return rng.standard_normal(self.dim)

    def spec_string(self):
        return f"euclidean:{self.dim}"
