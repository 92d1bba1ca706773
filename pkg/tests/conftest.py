import numpy as np
import pytest

from riemstat import make_manifold

# the geometry suite runs over this fixed roster
MANIFOLD_SPECS = [
    "sphere:3",
    "hyperbolic:2",
    "spd:2",
    "spd:3",
    "grassmann:4,2",
    "euclidean:5",
    "product[euclidean:2,sphere:2]",
]


@pytest.fixture(params=MANIFOLD_SPECS)
def manifold(request):
    return make_manifold(request.param)


def tangent_within_cut(m, rng, x, frac=0.9):
    """Random chart tangent whose norm stays below frac * cut distance."""
    coords = rng.standard_normal(m.dim)
    norm = np.linalg.norm(coords)
    if norm == 0:
        return coords
    cut = m.cut_distance()
    cap = frac * cut if np.isfinite(cut) else 2.0
    target = rng.uniform(0.05, 1.0) * cap
    return coords * (target / norm)


def point_discrepancy(m, a, b):
    """Separation measure that stays exact near zero.

    arccos/arccosh-based distances cannot resolve below ~1e-8; ambient
    differences can.  Grassmann points are compared through their projector
    matrices so representative rotations do not count.
    """
    from riemstat import Grassmann, Product

    if isinstance(m, Grassmann):
        A = a.reshape(m.d, m.p)
        B = b.reshape(m.d, m.p)
        return np.linalg.norm(A @ A.T - B @ B.T) / np.sqrt(2.0)
    if isinstance(m, Product):
        parts = [
            point_discrepancy(part, x, y) ** 2
            for part, x, y in zip(m.parts, m.split(a), m.split(b))
        ]
        return float(np.sqrt(sum(parts)))
    return float(np.linalg.norm(a - b))


def random_spd_matrix(rng, dim, scale=1.0):
    A = rng.standard_normal((dim, dim))
    return scale * (A @ A.T + dim * np.eye(dim))


def random_cov(rng, dim, scale=0.1):
    """Random well-conditioned covariance for chart-level statistics."""
    return random_spd_matrix(rng, dim, scale / dim)
