"""Abstract base class for the supported Riemannian manifolds.

Every manifold works on flat float64 arrays: a point is a 1-D array of
length ``ambient_dim`` (matrix-valued manifolds store the matrix row-major),
an ambient tangent vector has the same layout, and chart coordinates are
1-D arrays of length ``dim`` expressed in a deterministic orthonormal basis
attached to the base point.  Keeping everything flat makes datasets plain
(n_samples, ambient_dim) arrays that serialize to CSV rows directly.
"""

from abc import ABC, abstractmethod

import numpy as np

from ..exceptions import DimensionMismatchError


class Manifold(ABC):
    """A Riemannian manifold with closed-form geometry kernels.

    Attributes
    ----------
    dim : int
        Intrinsic dimension (length of chart coordinate vectors).
    ambient_dim : int
        Length of the flattened ambient representation of a point.
    """

    dim: int
    ambient_dim: int

    # ------------------------------------------------------------------
    # kernels every subclass provides
    # ------------------------------------------------------------------

    @abstractmethod
    def exp(self, x, u):
        """Geodesic exponential: follow the tangent u (ambient layout) from x."""

    @abstractmethod
    def log(self, x, y):
        """Inverse of :meth:`exp`: the ambient tangent at x pointing to y."""

    @abstractmethod
    def dist(self, x, y):
        """Geodesic distance between two points."""

    @abstractmethod
    def inner(self, x, u, v):
        """Riemannian inner product of two ambient tangents based at x."""

    @abstractmethod
    def transport(self, g, h, u):
        """Parallel transport of the ambient tangent u from g to h."""

    @abstractmethod
    def chart_basis(self, x):
        """Orthonormal tangent basis at x, shape (dim, ambient_dim).

        The construction is deterministic: the same point always yields the
        same basis, bit for bit.  Rows are ambient tangent vectors that are
        orthonormal under :meth:`inner`.
        """

    @abstractmethod
    def project(self, x):
        """Map an arbitrary ambient array to the closest manifold point."""

    @abstractmethod
    def check_point(self, x, atol=1e-9):
        """Raise if x violates the manifold's point invariants beyond atol."""

    @abstractmethod
    def random_point(self, rng):
        """Draw a random point (testing / initialization helper)."""

    # ------------------------------------------------------------------
    # chart machinery shared by all manifolds
    # ------------------------------------------------------------------

    def to_chart(self, x, u):
        """Coordinates of the ambient tangent u in the chart at x."""
        basis = self.chart_basis(x)
        return np.array([self.inner(x, row, u) for row in basis])

    def from_chart(self, x, coords):
        """Ambient tangent whose chart coordinates at x are ``coords``."""
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise DimensionMismatchError(
                f"chart coordinates must have shape ({self.dim},), got {coords.shape}"
            )
        return self.chart_basis(x).T @ coords

    def exp_coords(self, x, coords):
        """Exponential map taking chart coordinates at x."""
        return self.exp(x, self.from_chart(x, coords))

    def log_coords(self, x, y):
        """Logarithm expressed in the chart at x."""
        return self.to_chart(x, self.log(x, y))

    def transport_map(self, g, h):
        """Matrix of the parallel transport g -> h on chart coordinates.

        Column i is ``transport(g, h, basis_i)`` expressed in the chart at h;
        the result is orthogonal because transport is a metric isometry
        between orthonormal charts.
        """
        basis = self.chart_basis(g)
        cols = [self.to_chart(h, self.transport(g, h, row)) for row in basis]
        return np.column_stack(cols)

    def transport_cov(self, g, h, cov):
        """Congruence A cov A' moving a chart covariance from g to h."""
        A = self.transport_map(g, h)
        return A @ np.asarray(cov, dtype=float) @ A.T

    # ------------------------------------------------------------------
    # misc
    # ------------------------------------------------------------------

    def random_tangent(self, rng, x, scale=1.0):
        """Random chart coordinate vector at x (testing helper)."""
        return scale * rng.standard_normal(self.dim)

    def cut_distance(self):
        """Radius below which exp is injective; inf when there is no cut."""
        return np.inf

    @abstractmethod
    def spec_string(self):
        """Canonical textual description, e.g. ``sphere:2``."""

    def __repr__(self):
        return self.spec_string()

    def __eq__(self, other):
        return isinstance(other, Manifold) and self.spec_string() == other.spec_string()

    def __hash__(self):
        return hash(self.spec_string())

    def _check_shape(self, x, name="point"):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.ambient_dim,):
            raise DimensionMismatchError(
                f"{name} must have shape ({self.ambient_dim},) on {self}, got {x.shape}"
            )
        return x
