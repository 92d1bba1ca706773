"""Closed-form geometry kernels for the supported manifolds."""

from .base import Manifold
from .euclidean import Euclidean
from .grassmann import Grassmann
from .hyperbolic import Hyperbolic, minkowski_dot
from .product import Product
from .specs import SpecParseError, make_manifold
from .sphere import Sphere
from .spd import SPD, sym_matrix_function

__all__ = [
    "Manifold",
    "Euclidean",
    "Sphere",
    "Hyperbolic",
    "SPD",
    "Grassmann",
    "Product",
    "make_manifold",
    "SpecParseError",
    "minkowski_dot",
    "sym_matrix_function",
]
