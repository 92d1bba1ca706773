"""Grassmann manifold of p-dimensional subspaces of R^d."""

import numpy as np

from ..exceptions import CutLocusError, DegenerateInputError
from .base import Manifold

_ZERO_TOL = 1e-12
# principal angles this close to pi/2 are treated as the cut locus
_CUT_MARGIN = 1e-6


class Grassmann(Manifold):
    """G^{d,p}: subspaces represented by orthonormal d x p matrices.

    All formulas act on a representative; quantities that depend on the
    subspace alone (distance, log norms, exp images) are invariant under
    right rotation of the representative.  Points and tangents are stored
    flattened row-major, length d*p.
    """

    def __init__(self, d, p):
        if not 1 <= p < d:
            raise ValueError("need 1 <= p < d")
        self.d = int(d)
        self.p = int(p)
        self.dim = self.p * (self.d - self.p)
        self.ambient_dim = self.d * self.p

    def _mat(self, x, name="point"):
        x = self._check_shape(x, name)
        return x.reshape(self.d, self.p)

    def _flat(self, M):
        return np.asarray(M, dtype=float).reshape(-1)

    # -- kernels ------------------------------------------------------------

    def _principal_cosines(self, X, Y):
        return np.clip(np.linalg.svd(X.T @ Y, compute_uv=False), -1.0, 1.0)

    def dist(self, x, y):
        cos = self._principal_cosines(self._mat(x), self._mat(y))
        return float(np.linalg.norm(np.arccos(np.minimum(cos, 1.0))))

    def exp(self, x, h):
        X = self._mat(x)
        H = self._mat(h, "tangent")
        if np.linalg.norm(H) < _ZERO_TOL:
            return self._check_shape(x).copy()
        U, s, Vt = np.linalg.svd(H, full_matrices=False)
        Y = (X @ Vt.T * np.cos(s) + U * np.sin(s)) @ Vt
        return self._flat(Y)

    def log(self, x, y):
        if np.array_equal(x, y):
            return np.zeros(self.ambient_dim)
        X = self._mat(x)
        Y = self._mat(y)
        A = X.T @ Y
        cos = self._principal_cosines(X, Y)
        if cos.min() <= np.cos(np.pi / 2 - _CUT_MARGIN):
            raise CutLocusError(
                "a principal angle is within 1e-6 of pi/2: log undefined"
            )
        # (I - X X') Y (X'Y)^-1 via a right division
        M = np.linalg.solve(A.T, (Y - X @ A).T).T
        if np.linalg.norm(M) < _ZERO_TOL:
            return np.zeros(self.ambient_dim)
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        return self._flat(U @ (np.arctan(s)[:, None] * Vt))

    def inner(self, x, u, v):
        return float(np.dot(u, v))

    def transport(self, g, h, u):
        X = self._mat(g)
        Yrep = self._mat(h)
        H = self._mat(self.log(g, h), "tangent")
        G = self._mat(u, "tangent")
        U, s, Vt = np.linalg.svd(H, full_matrices=False)
        T = -(X @ Vt.T) * np.sin(s) + U * np.cos(s)
        moved = (T @ U.T + np.eye(self.d) - U @ U.T) @ G
        # the formula produces the tangent at the geodesic endpoint
        # representative; realign it with the caller's representative of h
        end = self._mat(self.exp(g, self._flat(H)))
        R = end.T @ Yrep
        Ur, _, Vtr = np.linalg.svd(R)
        return self._flat(moved @ (Ur @ Vtr))

    def chart_basis(self, x):
        Xperp = self._completion(self._mat(x))
        rows = np.empty((self.dim, self.ambient_dim))
        k = 0
        for i in range(self.d - self.p):
            for j in range(self.p):
                B = np.outer(Xperp[:, i], np.eye(self.p)[j])
                rows[k] = self._flat(B)
                k += 1
        return rows

    def _completion(self, X):
        # deterministic orthonormal completion via full QR
        Q = np.linalg.qr(X, mode="complete")[0]
        return Q[:, self.p:]

    def to_chart(self, x, u):
        Xperp = self._completion(self._mat(x))
        return (Xperp.T @ self._mat(u, "tangent")).reshape(-1)

    def from_chart(self, x, coords):
        coords = np.asarray(coords, dtype=float)
        C = coords.reshape(self.d - self.p, self.p)
        return self._flat(self._completion(self._mat(x)) @ C)

    def project(self, x):
        X = self._mat(x)
        Q, R = np.linalg.qr(X)
        if np.abs(np.diag(R)).min() < 1e-10:
            raise DegenerateInputError("matrix is rank deficient; no subspace defined")
        return self._flat(Q)

    def check_point(self, x, atol=1e-9):
        X = self._mat(x)
        if np.abs(X.T @ X - np.eye(self.p)).max() > atol:
            raise ValueError(f"columns are not orthonormal within {atol}")

    def random_point(self, rng):
        return self.project(self._flat(rng.standard_normal((self.d, self.p))))

    def cut_distance(self):
        # ||u|| below pi/2 keeps every principal angle short of the cut
        return np.pi / 2

    def spec_string(self):
        return f"grassmann:{self.d},{self.p}"
