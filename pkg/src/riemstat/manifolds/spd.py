"""Symmetric positive definite matrices with the affine-invariant metric."""

import numpy as np

from ..exceptions import DegenerateInputError
from .base import Manifold

_ZERO_TOL = 1e-12
# eigenvalue floor used by project()
_EIG_FLOOR = 1e-10


def _symmetrize(M):
    return 0.5 * (M + M.T)


def sym_matrix_function(M, fn):
    """Apply a scalar function to the eigenvalues of a symmetric matrix."""
    w, V = np.linalg.eigh(_symmetrize(M))
    return _symmetrize((V * fn(w)) @ V.T)


class SPD(Manifold):
    """S^d_++ of d x d SPD matrices, stored row-major as length d*d arrays.

    Geodesic distance ||log(X^-1/2 Y X^-1/2)||_F; the metric is invariant
    under congruence by any invertible matrix.  Matrix exp/log/sqrt are
    evaluated through symmetric eigendecompositions.
    """

    def __init__(self, n):
        if n < 1:
            raise ValueError("matrix size must be >= 1")
        self.n = int(n)
        self.dim = self.n * (self.n + 1) // 2
        self.ambient_dim = self.n * self.n
        # Mandel ordering: diagonal entries first, then upper off-diagonal
        # pairs row-major, scaled by sqrt(2).
        self._diag_idx = [(i, i) for i in range(self.n)]
        self._off_idx = [
            (i, j) for i in range(self.n) for j in range(i + 1, self.n)
        ]

    # -- matrix/flat helpers ------------------------------------------------

    def _mat(self, x, name="point"):
        x = self._check_shape(x, name)
        return x.reshape(self.n, self.n)

    def _flat(self, M):
        return _symmetrize(M).reshape(-1)

    def mandel_vec(self, S):
        """Orthonormal (Frobenius) coordinates of a symmetric matrix."""
        out = np.empty(self.dim)
        for k, (i, _) in enumerate(self._diag_idx):
            out[k] = S[i, i]
        root2 = np.sqrt(2.0)
        for k, (i, j) in enumerate(self._off_idx):
            out[self.n + k] = root2 * S[i, j]
        return out

    def mandel_mat(self, c):
        S = np.zeros((self.n, self.n))
        for k, (i, _) in enumerate(self._diag_idx):
            S[i, i] = c[k]
        inv_root2 = 1.0 / np.sqrt(2.0)
        for k, (i, j) in enumerate(self._off_idx):
            S[i, j] = S[j, i] = c[self.n + k] * inv_root2
        return S

    def _sqrt_pair(self, x):
        X = self._mat(x)
        w, V = np.linalg.eigh(_symmetrize(X))
        if w.min() <= 0:
            raise DegenerateInputError("matrix is not positive definite")
        sq = np.sqrt(w)
        Xs = _symmetrize((V * sq) @ V.T)
        Xis = _symmetrize((V / sq) @ V.T)
        return Xs, Xis

    # -- kernels ------------------------------------------------------------

    def exp(self, x, u):
        U = self._mat(u, "tangent")
        if np.linalg.norm(U) < _ZERO_TOL:
            return self._check_shape(x).copy()
        Xs, Xis = self._sqrt_pair(x)
        inner = sym_matrix_function(Xis @ U @ Xis, np.exp)
        return self._flat(Xs @ inner @ Xs)

    def log(self, x, y):
        if np.array_equal(x, y):
            return np.zeros(self.ambient_dim)
        Xs, Xis = self._sqrt_pair(x)
        S = _symmetrize(Xis @ self._mat(y) @ Xis)
        return self._flat(Xs @ sym_matrix_function(S, np.log) @ Xs)

    def dist(self, x, y):
        _, Xis = self._sqrt_pair(x)
        w = np.linalg.eigvalsh(_symmetrize(Xis @ self._mat(y) @ Xis))
        if w.min() <= 0:
            raise DegenerateInputError("second argument is not positive definite")
        return float(np.sqrt(np.sum(np.log(w) ** 2)))

    def inner(self, x, u, v):
        _, Xis = self._sqrt_pair(x)
        A = Xis @ self._mat(u, "tangent") @ Xis
        B = Xis @ self._mat(v, "tangent") @ Xis
        return float(np.tensordot(A, B))

    def transport(self, g, h, u):
        E = self._transport_factor(g, h)
        return self._flat(E @ self._mat(u, "tangent") @ E.T)

    def _transport_factor(self, g, h):
        # congruence factor (H G^-1)^(1/2); an isometry that also carries
        # geodesic velocities onto geodesic velocities
        Gs, Gis = self._sqrt_pair(g)
        S = _symmetrize(Gis @ self._mat(h) @ Gis)
        return Gs @ sym_matrix_function(S, np.sqrt) @ Gis

    def transport_map(self, g, h):
        E = self._transport_factor(g, h)
        _, His = self._sqrt_pair(h)
        Gs, _ = self._sqrt_pair(g)
        P = His @ E @ Gs  # orthogonal
        cols = np.empty((self.dim, self.dim))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = 1.0
            cols[:, k] = self.mandel_vec(_symmetrize(P @ self.mandel_mat(e) @ P.T))
        return cols

    def chart_basis(self, x):
        Xs, _ = self._sqrt_pair(x)
        rows = np.empty((self.dim, self.ambient_dim))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = 1.0
            rows[k] = self._flat(Xs @ self.mandel_mat(e) @ Xs)
        return rows

    def to_chart(self, x, u):
        _, Xis = self._sqrt_pair(x)
        return self.mandel_vec(_symmetrize(Xis @ self._mat(u, "tangent") @ Xis))

    def from_chart(self, x, coords):
        coords = np.asarray(coords, dtype=float)
        Xs, _ = self._sqrt_pair(x)
        return self._flat(Xs @ self.mandel_mat(coords) @ Xs)

    def project(self, x):
        S = _symmetrize(self._mat(x))
        w, V = np.linalg.eigh(S)
        return self._flat((V * np.maximum(w, _EIG_FLOOR)) @ V.T)

    def check_point(self, x, atol=1e-9):
        X = self._mat(x)
        if np.abs(X - X.T).max() > atol:
            raise ValueError(f"matrix is not symmetric within {atol}")
        if np.linalg.eigvalsh(_symmetrize(X)).min() <= 0:
            raise ValueError("matrix is not positive definite")

    def random_point(self, rng, scale=0.7):
        S = scale * rng.standard_normal((self.n, self.n))
        identity = np.eye(self.n).reshape(-1)
        return self.exp(identity, self._flat(_symmetrize(S)))

    def spec_string(self):
        return f"spd:{self.n}"
