"""Mixture models on manifolds: EM fitting and Gaussian mixture regression."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .exceptions import (
    CutLocusError,
    DimensionMismatchError,
    NoConvergenceError,
)
from .stats import (
    ManifoldGaussian,
    Partition,
    condition,
    karcher_mean,
    marginal_gaussian,
    regularize_covariance,
)
from .validation import check_points, check_weights

# a component whose total responsibility falls below this has lost its data
# support and gets reseeded at the worst-fit point
_COLLAPSE_TOL = 1e-9
_KMEANS_SWEEPS = 5


class ManifoldGMM:
    """Mixture of Gaussians sharing one manifold.

    Parameters
    ----------
    priors : array-like, shape (K,)
        Nonnegative mixture weights, normalized to sum to one.
    components : sequence of ManifoldGaussian
        All components must live on the same manifold.
    """

    def __init__(self, priors, components):
        components = list(components)
        if not components:
            raise ValueError("mixture needs at least one component")
        manifold = components[0].manifold
        for g in components[1:]:
            if g.manifold != manifold:
                raise DimensionMismatchError(
                    "mixture components live on different manifolds"
                )
        priors = np.asarray(priors, dtype=float)
        if priors.shape != (len(components),):
            raise DimensionMismatchError(
                f"expected {len(components)} priors, got shape {priors.shape}"
            )
        if np.any(priors < 0) or not np.all(np.isfinite(priors)):
            raise ValueError("priors must be finite and nonnegative")
        total = priors.sum()
        if total <= 0:
            raise ValueError("priors must not all be zero")
        self.manifold = manifold
        self.priors = priors / total
        self.components = components

    @property
    def n_components(self):
        return len(self.components)

    def _log_joint(self, X):
        """log prior + log component density, shape (n, K)."""
        with np.errstate(divide="ignore"):
            log_priors = np.log(self.priors)
        cols = [g.log_density_many(X) for g in self.components]
        return log_priors[None, :] + np.column_stack(cols)

    def log_density_many(self, X):
        return logsumexp(self._log_joint(X), axis=1)

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        return float(self.log_density_many(x[None, :])[0])

    def density(self, x):
        return float(np.exp(self.log_density(x)))

    def responsibilities(self, X):
        L = self._log_joint(X)
        return np.exp(L - logsumexp(L, axis=1, keepdims=True))

    def sample(self, n_samples, seed=None, return_labels=False):
        rng = np.random.default_rng(seed)
        labels = rng.choice(self.n_components, size=n_samples, p=self.priors)
        out = np.empty((n_samples, self.manifold.ambient_dim))
        for k, g in enumerate(self.components):
            picked = labels == k
            count = int(picked.sum())
            if count:
                out[picked] = g.sample(count, seed=int(rng.integers(2**63 - 1)))
        if return_labels:
            return out, labels
        return out


def marginal(model, parts):
    """Restrict a mixture on a product manifold to the selected parts."""
    comps = [marginal_gaussian(g, parts) for g in model.components]
    return ManifoldGMM(model.priors.copy(), comps)


@dataclass
class EmReport:
    """Diagnostics from one EM run."""

    log_likelihoods: np.ndarray
    n_iter: int
    responsibilities: np.ndarray
    reseeds: list = field(default_factory=list)
    converged: bool = True


def _distance_matrix(manifold, X, centers):
    D = np.empty((X.shape[0], centers.shape[0]))
    for k, c in enumerate(centers):
        D[:, k] = [manifold.dist(c, x) for x in X]
    return D


def _kmeans_init(manifold, X, n_components, weights, rng, tol):
    """Geodesic k-means++ seeding followed by a few Lloyd sweeps."""
    n = X.shape[0]
    centers = [X[int(rng.integers(n))]]
    d2 = np.array([manifold.dist(centers[0], x) ** 2 for x in X]) * weights
    while len(centers) < n_components:
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers.append(X[idx])
        fresh = np.array([manifold.dist(centers[-1], x) ** 2 for x in X])
        d2 = np.minimum(d2, fresh * weights)
    centers = np.stack(centers)

    for _ in range(_KMEANS_SWEEPS):
        labels = np.argmin(_distance_matrix(manifold, X, centers), axis=1)
        for k in range(n_components):
            members = labels == k
            if not members.any() or weights[members].sum() <= 0:
                continue
            try:
                g, _ = karcher_mean(
                    manifold, X[members], weights=weights[members], tol=tol
                )
            except (CutLocusError, NoConvergenceError):
                continue
            centers[k] = g.mean
    return centers


def _hard_assignment(D):
    """One-hot responsibilities from a distance matrix, no empty columns.

    Empty clusters are each donated the point sitting farthest from its
    assigned center, so the first maximization step always has support.
    """
    n, K = D.shape
    labels = np.argmin(D, axis=1)
    for k in range(K):
        if not np.any(labels == k):
            spread = D[np.arange(n), labels]
            movable = np.flatnonzero(np.bincount(labels, minlength=K)[labels] > 1)
            donor = movable[np.argmax(spread[movable])]
            labels[donor] = k
    resp = np.zeros((n, K))
    resp[np.arange(n), labels] = 1.0
    return resp


def _reseed_component(manifold, X, weights, at):
    """Replacement component for one that lost its data support.

    Centered on the worst-fit point with the dataset-wide spread, so it can
    recapture mass on the next sweep instead of collapsing again.
    """
    V = np.stack([manifold.log_coords(at, x) for x in X])
    cov = (V * weights[:, None]).T @ V
    return ManifoldGaussian(manifold, at, regularize_covariance(cov))


def _m_step(manifold, X, weights, resp, tol, previous=None):
    # warm-starting each mean solve at the previous component mean keeps the
    # sweep an ascent step, so the likelihood trace stays monotone; the first
    # maximization has no previous model and uses the default start.  Warm
    # solves run tighter than the caller's tol: stopping a warm solve early
    # freezes the mean wherever the previous sweep left it, and that offset
    # would show up against exact reference implementations.
    priors = weights @ resp
    components = [
        karcher_mean(
            manifold,
            X,
            weights=weights * resp[:, k],
            tol=tol if previous is None else min(tol, 1e-9),
            init=None if previous is None else previous[k].mean,
        )[0]
        for k in range(resp.shape[1])
    ]
    return priors, components


def em_fit(
    manifold,
    points,
    n_components,
    *,
    weights=None,
    seed=0,
    tol=1e-6,
    tol_ll=None,
    max_iter=200,
    init_means=None,
):
    """Fit a Gaussian mixture by expectation-maximization.

    The maximization step re-estimates every component with a weighted
    intrinsic mean; the sweep stops once the data log-likelihood improves
    by less than ``tol_ll`` (default ``1e-8 * n``).

    Returns the fitted :class:`ManifoldGMM` and an :class:`EmReport`.
    """
    X = check_points(manifold, points, "points")
    n = X.shape[0]
    K = int(n_components)
    if K < 1:
        raise ValueError("n_components must be at least 1")
    if n < K:
        raise ValueError(f"need at least {K} points to fit {K} components")
    w = check_weights(weights, n)
    if tol_ll is None:
        tol_ll = 1e-8 * n

    if init_means is None:
        rng = np.random.default_rng(seed)
        centers = _kmeans_init(manifold, X, K, w, rng, tol)
    else:
        centers = check_points(manifold, init_means, "init_means")
        if centers.shape[0] != K:
            raise DimensionMismatchError(
                f"init_means must supply {K} points, got {centers.shape[0]}"
            )

    resp = _hard_assignment(_distance_matrix(manifold, X, centers))
    priors, components = _m_step(manifold, X, w, resp, tol)
    resp_used = resp  # responsibilities behind the current components

    trace = []
    reseeds = []
    ll_prev = -np.inf
    previous = None  # model and responsibilities one sweep back
    converged = False
    for sweep in range(1, max_iter + 1):
        model = ManifoldGMM(priors, components)
        L = model._log_joint(X)
        row_ll = logsumexp(L, axis=1)
        ll = n * float(w @ row_ll)
        trace.append(ll)
        resp = np.exp(L - row_ll[:, None])

        dead = np.flatnonzero(w @ resp < _COLLAPSE_TOL)
        if dead.size:
            worst = int(np.argmin(row_ll))
            fresh = _reseed_component(manifold, X, w, X[worst])
            for k in dead:
                components[k] = fresh
                priors[k] = 1.0 / K
                reseeds.append((sweep, int(k)))
            priors = priors / priors.sum()
            ll_prev = -np.inf  # the model jumped; restart the improvement gate
            previous = None
            continue

        if ll - ll_prev < tol_ll:
            if previous is not None and ll - ll_prev < -1e-10:
                # the intrinsic-mean update optimizes squared distances, not
                # the anisotropic likelihood, so the last sweep can overshoot
                # on curved spaces; keep the better model
                priors, components, resp = previous
                trace.pop()
            converged = True
            break
        ll_prev = ll
        previous = (priors, components, resp)
        if not np.array_equal(resp, resp_used):
            priors, components = _m_step(
                manifold, X, w, resp, tol, previous=components
            )
            resp_used = resp

    if not converged:
        raise NoConvergenceError(
            f"EM stalled above tol_ll after {max_iter} sweeps", n_iter=max_iter
        )
    report = EmReport(np.asarray(trace), len(trace), resp, reseeds, True)
    return ManifoldGMM(priors, components), report


def gmr(model, partition, x_in, tol=1e-6, max_iter=100, return_weights=False):
    """Regress the output parts of a joint mixture against an input point.

    Each component is conditioned on ``x_in`` and weighted by how well its
    input marginal explains the query; the weighted conditionals are then
    collapsed to a single Gaussian by moment matching around their
    intrinsic mean.
    """
    if not isinstance(partition, Partition):
        raise TypeError("partition must be a Partition")
    x_in = np.asarray(x_in, dtype=float)
    K = model.n_components

    log_w = np.full(K, -np.inf)
    for k in range(K):
        if model.priors[k] <= 0:
            continue
        marg_in = marginal_gaussian(model.components[k], partition.in_parts)
        try:
            log_pdf = marg_in.log_density(x_in)
        except CutLocusError:
            continue  # unreachable component gets zero activation
        log_w[k] = np.log(model.priors[k]) + log_pdf
    if not np.any(np.isfinite(log_w)):
        raise CutLocusError(
            "query lies beyond the cut locus of every component's input marginal"
        )
    h = np.exp(log_w - logsumexp(log_w))

    live = np.flatnonzero(h > 0)
    conditionals = {
        k: condition(model.components[k], partition, x_in, tol=tol, max_iter=max_iter)[0]
        for k in live
    }

    out_m = partition.output_manifold
    mean_g, _ = karcher_mean(
        out_m,
        np.stack([conditionals[k].mean for k in live]),
        weights=h[live],
        tol=tol,
        max_iter=max_iter,
    )
    mu = mean_g.mean
    cov = np.zeros((out_m.dim, out_m.dim))
    for k in live:
        g = conditionals[k]
        v = out_m.log_coords(mu, g.mean)
        cov += h[k] * (out_m.transport_cov(g.mean, mu, g.cov) + np.outer(v, v))

    result = ManifoldGaussian(out_m, mu, cov)
    if return_weights:
        return result, h
    return result
