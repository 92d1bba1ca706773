"""riemstat: Gaussian statistics, mixtures and tracking control on manifolds."""

from .exceptions import (
    CutLocusError,
    DegenerateInputError,
    DimensionMismatchError,
    NoConvergenceError,
    RiemstatError,
    SingularInputError,
    SingularSystemError,
)
from .manifolds import (
    SPD,
    Euclidean,
    Grassmann,
    Hyperbolic,
    Manifold,
    Product,
    SpecParseError,
    Sphere,
    make_manifold,
)
from .stats import (
    ManifoldGaussian,
    Partition,
    condition,
    fuse,
    karcher_mean,
    marginal_gaussian,
    regularize_covariance,
)
from .mixture import EmReport, ManifoldGMM, em_fit, gmr, marginal
from .control import (
    LinearSystem,
    LqtWeights,
    StepwiseReference,
    build_transfer,
    lqt_objective,
    lqt_solve,
    mpc_rollout,
    riemannian_mpc_step,
)
from .estimators import FrechetMean, GMMRegressor, RiemannianGaussianMixture
from .io import Dataset, read_dataset, read_model, write_dataset, write_model

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Manifold",
    "Euclidean",
    "Sphere",
    "Hyperbolic",
    "SPD",
    "Grassmann",
    "Product",
    "make_manifold",
    "SpecParseError",
    "ManifoldGaussian",
    "Partition",
    "karcher_mean",
    "fuse",
    "condition",
    "marginal_gaussian",
    "regularize_covariance",
    "ManifoldGMM",
    "EmReport",
    "em_fit",
    "gmr",
    "marginal",
    "LinearSystem",
    "LqtWeights",
    "StepwiseReference",
    "build_transfer",
    "lqt_solve",
    "lqt_objective",
    "riemannian_mpc_step",
    "mpc_rollout",
    "FrechetMean",
    "RiemannianGaussianMixture",
    "GMMRegressor",
    "Dataset",
    "read_dataset",
    "write_dataset",
    "read_model",
    "write_model",
    "RiemstatError",
    "CutLocusError",
    "DegenerateInputError",
    "DimensionMismatchError",
    "NoConvergenceError",
    "SingularInputError",
    "SingularSystemError",
]
