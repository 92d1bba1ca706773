"""Gaussian distributions on manifolds: density, estimation, fusion, conditioning.

A Gaussian is parameterized by a mean point and a covariance expressed in
the orthonormal chart at that mean.  Its density at x evaluates the usual
Euclidean normal at the chart image of log(mean, x); all estimation routines
are short fixed-point loops alternating tangent-space least squares with an
exponential update of the base point.
"""

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .exceptions import (
    DimensionMismatchError,
    NoConvergenceError,
    SingularInputError,
)
from .manifolds import Product, make_manifold
from .validation import as_float_array, check_covariance, check_weights

LOG_2PI = float(np.log(2.0 * np.pi))

# default ridge: relative to the mean eigenvalue, with an absolute floor so
# degenerate (zero) covariances still invert
REG_LAMBDA = 1e-6
REG_FLOOR = 1e-12


def regularize_covariance(cov, lam=REG_LAMBDA, floor=REG_FLOOR):
    """Symmetrize and add a trace-proportional ridge."""
    cov = np.asarray(cov, dtype=float)
    dim = cov.shape[0]
    sym = 0.5 * (cov + cov.T)
    ridge = max(lam * np.trace(sym) / dim, floor)
    return sym + ridge * np.eye(dim)


def _cho_or_raise(S, what="covariance"):
    try:
        return cho_factor(S, lower=True)
    except np.linalg.LinAlgError:
        pass
    try:
        return cho_factor(S + REG_FLOOR * np.eye(S.shape[0]), lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularInputError(f"{what} is singular") from exc


class ManifoldGaussian:
    """Gaussian with mean on a manifold and chart-coordinate covariance.

    Parameters
    ----------
    manifold : Manifold or str
        Carrier manifold (description strings are accepted).
    mean : ndarray, shape (ambient_dim,)
        Mean point in ambient layout.
    cov : ndarray, shape (dim, dim)
        Covariance in the orthonormal chart at the mean; symmetric within
        1e-9 (it is symmetrized on construction).
    """

    def __init__(self, manifold, mean, cov):
        self.manifold = make_manifold(manifold)
        self.mean = as_float_array(mean, "mean", ndim=1)
        if self.mean.shape[0] != self.manifold.ambient_dim:
            raise DimensionMismatchError(
                f"mean must have length {self.manifold.ambient_dim} on "
                f"{self.manifold}, got {self.mean.shape[0]}"
            )
        self.cov = check_covariance(cov, self.manifold.dim)
        self._chol = None

    @property
    def dim(self):
        return self.manifold.dim

    def __repr__(self):
        return f"ManifoldGaussian({self.manifold}, mean={self.mean!r})"

    def _cholesky(self):
        if self._chol is None:
            self._chol = _cho_or_raise(self.cov)
            L = self._chol[0]
            self._logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
        return self._chol

    def mahalanobis_sq(self, x):
        v = self.manifold.log_coords(self.mean, as_float_array(x, "x", ndim=1))
        cho = self._cholesky()
        return float(v @ cho_solve(cho, v))

    def log_density(self, x):
        maha = self.mahalanobis_sq(x)
        self._cholesky()
        return -0.5 * (self.dim * LOG_2PI + self._logdet + maha)

    def density(self, x):
        return float(np.exp(self.log_density(x)))

    def log_density_many(self, X):
        """Vectorized log density over rows of X, shape (n, ambient_dim)."""
        X = np.asarray(X, dtype=float)
        V = np.stack([self.manifold.log_coords(self.mean, row) for row in X])
        cho = self._cholesky()
        Y = solve_triangular(cho[0], V.T, lower=True)
        maha = np.sum(Y * Y, axis=0)
        return -0.5 * (self.dim * LOG_2PI + self._logdet + maha)

    def sample(self, n_samples=1, seed=None):
        """Draw points by pushing tangent normal samples through exp."""
        rng = np.random.default_rng(seed)
        try:
            L = np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError:
            w, V = np.linalg.eigh(self.cov)
            L = V * np.sqrt(np.maximum(w, 0.0))
        Z = rng.standard_normal((int(n_samples), self.dim))
        return np.stack(
            [self.manifold.exp_coords(self.mean, L @ z) for z in Z]
        )


def karcher_mean(manifold, points, weights=None, tol=1e-6, max_iter=100, init=None):
    """Weighted intrinsic mean by Gauss-Newton on the tangent update.

    Iterates u = sum_n w_n log(mean, x_n) and mean <- exp(mean, u) until
    ||u|| < tol, starting from the highest-weight datapoint (the first one
    for uniform weights) or from ``init`` when given.  Returns the fitted
    Gaussian, whose covariance is the weighted second moment of the log
    images at the converged mean (ridge-regularized), together with the
    iteration count.

    Raises
    ------
    NoConvergenceError
        After max_iter updates without meeting the tolerance.
    """
    manifold = make_manifold(manifold)
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[1] != manifold.ambient_dim:
        raise DimensionMismatchError(
            f"points must have shape (n, {manifold.ambient_dim}), got {X.shape}"
        )
    w = check_weights(weights, X.shape[0])
    if init is None:
        mean = X[int(np.argmax(w))].copy()
    else:
        mean = as_float_array(init, "init").copy()
        manifold.check_point(mean)
    for it in range(1, max_iter + 1):
        V = np.stack([manifold.log_coords(mean, row) for row in X])
        step = w @ V
        if np.linalg.norm(step) < tol:
            cov = regularize_covariance((V * w[:, None]).T @ V)
            return ManifoldGaussian(manifold, mean, cov), it
        mean = manifold.exp_coords(mean, step)
    raise NoConvergenceError(
        f"intrinsic mean did not converge within {max_iter} iterations",
        n_iter=max_iter,
    )


def fuse(gaussians, tol=1e-6, max_iter=100):
    """Product of Gaussians sharing a manifold (information fusion).

    Fixed point of u = (sum_k P_k)^-1 sum_k P_k log(mean, mean_k) where P_k
    is the k-th precision parallel-transported into the chart at the current
    mean estimate.  The fused covariance is the inverse precision sum at the
    converged mean.  Returns (gaussian, n_iter).
    """
    gaussians = list(gaussians)
    if not gaussians:
        raise ValueError("fuse needs at least one Gaussian")
    manifold = gaussians[0].manifold
    for g in gaussians[1:]:
        if g.manifold != manifold:
            raise DimensionMismatchError("fused Gaussians must share one manifold")
    dim = manifold.dim
    mean = gaussians[0].mean.copy()
    for it in range(1, max_iter + 1):
        H = np.zeros((dim, dim))
        rhs = np.zeros(dim)
        for g in gaussians:
            A = manifold.transport_map(g.mean, mean)
            moved = A @ g.cov @ A.T
            prec = cho_solve(_cho_or_raise(moved), np.eye(dim))
            H += prec
            rhs += prec @ manifold.log_coords(mean, g.mean)
        step = np.linalg.solve(H, rhs)
        if np.linalg.norm(step) < tol:
            cov = cho_solve(_cho_or_raise(H, "precision sum"), np.eye(dim))
            return ManifoldGaussian(manifold, mean, check_covariance(cov, dim, atol=1e-6)), it
        mean = manifold.exp_coords(mean, step)
    raise NoConvergenceError(
        f"fusion did not converge within {max_iter} iterations", n_iter=max_iter
    )


class Partition:
    """Split of a product manifold's parts into input and output blocks.

    Part indices must be strictly increasing; input and output must be
    disjoint and together cover every part.  When ``out_parts`` is omitted
    it is the complement of ``in_parts``.
    """

    def __init__(self, manifold, in_parts, out_parts=None):
        manifold = make_manifold(manifold)
        if not isinstance(manifold, Product):
            raise DimensionMismatchError("a partition needs a product manifold")
        self.manifold = manifold
        n = len(manifold.parts)
        self.in_parts = tuple(int(k) for k in in_parts)
        if out_parts is None:
            self.out_parts = tuple(k for k in range(n) if k not in self.in_parts)
        else:
            self.out_parts = tuple(int(k) for k in out_parts)
        for name, parts in (("in_parts", self.in_parts), ("out_parts", self.out_parts)):
            if any(not 0 <= k < n for k in parts):
                raise ValueError(f"{name} out of range for {manifold}")
            if list(parts) != sorted(set(parts)):
                raise ValueError(f"{name} must be strictly increasing")
        if set(self.in_parts) & set(self.out_parts):
            raise ValueError("in_parts and out_parts overlap")
        if set(self.in_parts) | set(self.out_parts) != set(range(n)):
            raise ValueError("in_parts and out_parts must cover every part")
        if not self.out_parts:
            raise ValueError("output side of a partition cannot be empty")

    def _sub_manifold(self, parts):
        if len(parts) == 1:
            return self.manifold.parts[parts[0]]
        return Product([self.manifold.parts[k] for k in parts])

    @property
    def input_manifold(self):
        if not self.in_parts:
            raise ValueError("partition has no input parts")
        return self._sub_manifold(self.in_parts)

    @property
    def output_manifold(self):
        return self._sub_manifold(self.out_parts)

    def ambient_indices(self, parts):
        slices = [self.manifold.ambient_slice(k) for k in parts]
        return np.concatenate([np.arange(s.start, s.stop) for s in slices]) if slices else np.array([], dtype=int)

    def chart_indices(self, parts):
        slices = [self.manifold.chart_slice(k) for k in parts]
        return np.concatenate([np.arange(s.start, s.stop) for s in slices]) if slices else np.array([], dtype=int)


def marginal_gaussian(gaussian, parts):
    """Marginal of a joint Gaussian over the selected product parts."""
    joint = gaussian.manifold
    if not isinstance(joint, Product):
        raise DimensionMismatchError("marginals need a product manifold")
    parts = tuple(int(k) for k in parts)
    if len(parts) == 1:
        sub = joint.parts[parts[0]]
    else:
        sub = Product([joint.parts[k] for k in parts])
    amb = np.concatenate(
        [np.arange(joint.ambient_slice(k).start, joint.ambient_slice(k).stop) for k in parts]
    )
    ch = np.concatenate(
        [np.arange(joint.chart_slice(k).start, joint.chart_slice(k).stop) for k in parts]
    )
    return ManifoldGaussian(sub, gaussian.mean[amb], gaussian.cov[np.ix_(ch, ch)])


def condition(joint, partition, x_in, tol=1e-6, max_iter=100):
    """Condition a joint Gaussian on observed input parts.

    The joint covariance is transported blockwise: input blocks into the
    chart at the observation, output blocks into the chart at the current
    output estimate.  The update combines the pull toward the prior output
    mean with the input-residual gain; the output covariance is the Schur
    complement of the transported input block at convergence.  Returns
    (gaussian, n_iter).
    """
    if joint.manifold != partition.manifold:
        raise DimensionMismatchError("partition does not match the joint manifold")
    prod = partition.manifold
    out_m = partition.output_manifold
    amb_out = partition.ambient_indices(partition.out_parts)
    mu_out = joint.mean[amb_out]
    idx_out = partition.chart_indices(partition.out_parts)
    if not partition.in_parts:
        # nothing observed: the conditional is the marginal
        return (
            ManifoldGaussian(out_m, mu_out, joint.cov[np.ix_(idx_out, idx_out)]),
            1,
        )
    in_m = partition.input_manifold
    amb_in = partition.ambient_indices(partition.in_parts)
    mu_in = joint.mean[amb_in]
    x_in = as_float_array(x_in, "x_in", ndim=1)
    if x_in.shape[0] != in_m.ambient_dim:
        raise DimensionMismatchError(
            f"x_in must have length {in_m.ambient_dim} on {in_m}"
        )
    idx_in = partition.chart_indices(partition.in_parts)
    w = in_m.log_coords(x_in, mu_in)

    mu_hat = mu_out.copy()
    in_split = dict(zip(partition.in_parts, _split_on(in_m, x_in)))
    for it in range(1, max_iter + 1):
        out_split = dict(zip(partition.out_parts, _split_on(out_m, mu_hat)))
        A = np.zeros((prod.dim, prod.dim))
        for k, part in enumerate(prod.parts):
            target = in_split[k] if k in in_split else out_split[k]
            s = prod.chart_slice(k)
            A[s, s] = part.transport_map(joint.mean[prod.ambient_slice(k)], target)
        moved = A @ joint.cov @ A.T
        Sii = moved[np.ix_(idx_in, idx_in)]
        Soi = moved[np.ix_(idx_out, idx_in)]
        cho = _cho_or_raise(Sii, "transported input covariance")
        step = out_m.log_coords(mu_hat, mu_out) - Soi @ cho_solve(cho, w)
        if np.linalg.norm(step) < tol:
            Soo = moved[np.ix_(idx_out, idx_out)]
            schur = Soo - Soi @ cho_solve(cho, Soi.T)
            return ManifoldGaussian(out_m, mu_hat, check_covariance(schur, out_m.dim, atol=1e-6)), it
        mu_hat = out_m.exp_coords(mu_hat, step)
    raise NoConvergenceError(
        f"conditioning did not converge within {max_iter} iterations",
        n_iter=max_iter,
    )


def _split_on(manifold, x):
    if isinstance(manifold, Product):
        return manifold.split(x)
    return [x]
