"""scikit-learn style wrappers around the fitting routines.

These follow the usual estimator conventions: constructor arguments are
stored verbatim, all validation and computation happens in ``fit``, and
fitted state lives in trailing-underscore attributes.  The functional API
in ``stats`` and ``mixture`` stays the primary interface; these classes
exist so the models drop into sklearn pipelines and model selection.
"""

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin, TransformerMixin

from .manifolds import make_manifold
from .mixture import em_fit, gmr
from .stats import Partition, karcher_mean
from .validation import check_points


class FrechetMean(TransformerMixin, BaseEstimator):
    """Intrinsic mean of points on a manifold.

    ``transform`` maps points to their coordinates in the orthonormal chart
    at the fitted mean, which turns manifold data into plain vectors for
    downstream Euclidean estimators; ``inverse_transform`` maps back.

    Parameters
    ----------
    manifold : Manifold or str
        Carrier manifold, e.g. ``"sphere:2"``.
    tol : float
        Stop when the tangent update norm drops below this.
    max_iter : int
        Iteration budget for the fixed-point loop.
    """

    def __init__(self, manifold, *, tol=1e-6, max_iter=100):
        self.manifold = manifold
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None, sample_weight=None):
        m = make_manifold(self.manifold)
        gaussian, n_iter = karcher_mean(
            m, X, weights=sample_weight, tol=self.tol, max_iter=self.max_iter
        )
        self.manifold_ = m
        self.mean_ = gaussian.mean
        self.covariance_ = gaussian.cov
        self.n_iter_ = n_iter
        return self

    def transform(self, X):
        X = check_points(self.manifold_, X)
        return np.stack([self.manifold_.log_coords(self.mean_, row) for row in X])

    def inverse_transform(self, V):
        V = np.atleast_2d(np.asarray(V, dtype=float))
        return np.stack([self.manifold_.exp_coords(self.mean_, v) for v in V])


class RiemannianGaussianMixture(DensityMixin, BaseEstimator):
    """Mixture of Gaussians on a manifold, fitted by EM.

    Parameters
    ----------
    manifold : Manifold or str
        Carrier manifold.
    n_components : int
        Number of mixture components.
    tol : float
        Tolerance of the per-component mean solves.
    tol_ll : float or None
        Stop when the log-likelihood improves by less than this
        (``None`` scales a default with the dataset size).
    max_iter : int
        EM sweep budget.
    random_state : int
        Seed for the k-means style initialization.
    init_means : array or None
        Explicit initial component means, bypassing the seeded init.
    """

    def __init__(
        self,
        manifold,
        n_components=1,
        *,
        tol=1e-6,
        tol_ll=None,
        max_iter=200,
        random_state=0,
        init_means=None,
    ):
        self.manifold = manifold
        self.n_components = n_components
        self.tol = tol
        self.tol_ll = tol_ll
        self.max_iter = max_iter
        self.random_state = random_state
        self.init_means = init_means

    def fit(self, X, y=None, sample_weight=None):
        model, report = em_fit(
            make_manifold(self.manifold),
            X,
            self.n_components,
            weights=sample_weight,
            seed=self.random_state,
            tol=self.tol,
            tol_ll=self.tol_ll,
            max_iter=self.max_iter,
            init_means=self.init_means,
        )
        self.gmm_ = model
        self.weights_ = model.priors
        self.means_ = np.stack([g.mean for g in model.components])
        self.covariances_ = np.stack([g.cov for g in model.components])
        self.report_ = report
        self.n_iter_ = report.n_iter
        return self

    def predict_proba(self, X):
        return self.gmm_.responsibilities(check_points(self.gmm_.manifold, X))

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def fit_predict(self, X, y=None, sample_weight=None):
        return self.fit(X, sample_weight=sample_weight).predict(X)

    def score_samples(self, X):
        return self.gmm_.log_density_many(check_points(self.gmm_.manifold, X))

    def score(self, X, y=None):
        return float(np.mean(self.score_samples(X)))

    def sample(self, n_samples=1):
        return self.gmm_.sample(
            n_samples, seed=self.random_state, return_labels=True
        )


class GMMRegressor(BaseEstimator):
    """Regression by conditioning a joint mixture on a product manifold.

    Fits a mixture to joint (input, output) points, then predicts the
    output blocks from the input blocks by conditioning each component
    and blending.

    Parameters
    ----------
    manifold : Product or str
        Joint manifold; must be a product, e.g.
        ``"product[euclidean:1,spd:2]"``.
    in_parts : sequence of int
        Indices of the product parts that form the regression input.
    n_components : int
        Number of mixture components.
    tol, tol_ll, max_iter, random_state
        Passed through to the EM fit (see RiemannianGaussianMixture).
    """

    def __init__(
        self,
        manifold,
        in_parts,
        n_components=1,
        *,
        tol=1e-6,
        tol_ll=None,
        max_iter=200,
        random_state=0,
    ):
        self.manifold = manifold
        self.in_parts = in_parts
        self.n_components = n_components
        self.tol = tol
        self.tol_ll = tol_ll
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y=None, sample_weight=None):
        """Fit the joint mixture.

        X holds joint rows; alternatively pass the input block in X and
        the output block in y and they are concatenated columnwise.
        """
        partition = Partition(make_manifold(self.manifold), self.in_parts)
        X = np.asarray(X, dtype=float)
        if y is not None:
            X = np.column_stack([X, np.asarray(y, dtype=float)])
        model, report = em_fit(
            partition.manifold,
            X,
            self.n_components,
            weights=sample_weight,
            seed=self.random_state,
            tol=self.tol,
            tol_ll=self.tol_ll,
            max_iter=self.max_iter,
        )
        self.partition_ = partition
        self.gmm_ = model
        self.report_ = report
        self.n_iter_ = report.n_iter
        return self

    def predict_gaussian(self, x):
        """Full conditional Gaussian of the output block for one input."""
        return gmr(self.gmm_, self.partition_, x, tol=self.tol)

    def predict(self, X):
        """Conditional mean points, one row per input row."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.stack([self.predict_gaussian(x).mean for x in X])
