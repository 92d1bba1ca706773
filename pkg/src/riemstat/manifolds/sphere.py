"""Unit sphere S^d embedded in R^{d+1}."""

import numpy as np

from ..exceptions import CutLocusError, DegenerateInputError
from .base import Manifold

# below this separation points are treated as identical
_ZERO_TOL = 1e-12
# log/transport refuse within this angle of the antipode
_ANTIPODE_MARGIN = 1e-6


class Sphere(Manifold):
    """S^d = {x in R^{d+1} : ||x|| = 1} with the induced round metric."""

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)
        self.ambient_dim = int(dim) + 1

    def exp(self, x, u):
        x = self._check_shape(x)
        u = self._check_shape(u, "tangent")
        norm = np.linalg.norm(u)
        if norm < _ZERO_TOL:
            return x.copy()
        return np.cos(norm) * x + np.sin(norm) * (u / norm)

    def log(self, x, y):
        x = self._check_shape(x)
        y = self._check_shape(y)
        cos = float(np.clip(np.dot(x, y), -1.0, 1.0))
        angle = np.arccos(cos)
        if angle > np.pi - _ANTIPODE_MARGIN:
            raise CutLocusError(
                f"points are antipodal within {_ANTIPODE_MARGIN}: log undefined"
            )
        perp = y - cos * x
        norm = np.linalg.norm(perp)
        # arccos of a rounded dot product reports ~1e-8 separation even for
        # identical points; the residual norm is the reliable zero test
        if norm < _ZERO_TOL:
            return np.zeros(self.ambient_dim)
        return angle * perp / norm

    def dist(self, x, y):
        cos = np.clip(np.dot(self._check_shape(x), self._check_shape(y)), -1.0, 1.0)
        return float(np.arccos(cos))

    def inner(self, x, u, v):
        return float(np.dot(u, v))

    def transport(self, g, h, u):
        fwd = self.log(g, h)
        d2 = np.dot(fwd, fwd)
        # below ~1e-7 separation the correction is noise; transport ~ identity
        if d2 < 1e-14:
            return np.asarray(u, dtype=float).copy()
        back = self.log(h, g)
        u = np.asarray(u, dtype=float)
        return u - (np.dot(fwd, u) / d2) * (fwd + back)

    def chart_basis(self, x):
        # Householder reflection sending the last canonical axis onto x;
        # its first dim columns give an orthonormal tangent basis.
        x = self._check_shape(x)
        w = -x.copy()
        w[-1] += 1.0
        nw = np.linalg.norm(w)
        if nw < _ZERO_TOL:
            return np.eye(self.ambient_dim)[: self.dim]
        w /= nw
        H = np.eye(self.ambient_dim) - 2.0 * np.outer(w, w)
        return H[:, : self.dim].T

    def project(self, x):
        x = self._check_shape(x)
        norm = np.linalg.norm(x)
        if norm < _ZERO_TOL:
            raise DegenerateInputError("cannot project the zero vector onto a sphere")
        return x / norm

    def check_point(self, x, atol=1e-9):
        x = self._check_shape(x)
        if abs(np.linalg.norm(x) - 1.0) > atol:
            raise ValueError(f"point is off the unit sphere by more than {atol}")

    def random_point(self, rng):
        return self.project(rng.standard_normal(self.ambient_dim))

    def cut_distance(self):
        return np.pi

    def spec_string(self):
        return f"sphere:{self.dim}"
