"""Cartesian products of manifolds; every kernel acts blockwise."""

import numpy as np

from ..exceptions import DimensionMismatchError
from .base import Manifold


class Product(Manifold):
    """Product manifold with the sum metric (squared distances add).

    Nested products are flattened on construction, so parts are always
    elementary manifolds.  Ambient layouts and chart coordinates are the
    concatenation of the parts' layouts in order.
    """

    def __init__(self, parts):
        flat = []
        for part in parts:
            if isinstance(part, Product):
                flat.extend(part.parts)
            else:
                flat.append(part)
        if not flat:
            raise ValueError("a product needs at least one part")
        self.parts = tuple(flat)
        self.dim = sum(m.dim for m in self.parts)
        self.ambient_dim = sum(m.ambient_dim for m in self.parts)
        amb_off = np.cumsum([0] + [m.ambient_dim for m in self.parts])
        chart_off = np.cumsum([0] + [m.dim for m in self.parts])
        self._amb_slices = [
            slice(int(a), int(b)) for a, b in zip(amb_off[:-1], amb_off[1:])
        ]
        self._chart_slices = [
            slice(int(a), int(b)) for a, b in zip(chart_off[:-1], chart_off[1:])
        ]

    # -- part bookkeeping ----------------------------------------------------

    def ambient_slice(self, k):
        return self._amb_slices[k]

    def chart_slice(self, k):
        return self._chart_slices[k]

    def split(self, x):
        x = self._check_shape(x)
        return [x[s] for s in self._amb_slices]

    def join(self, values):
        return np.concatenate([np.asarray(v, dtype=float).ravel() for v in values])

    def _map_parts(self, fn, *arrays):
        pieces = [self.split(a) for a in arrays]
        return [fn(m, *(p[k] for p in pieces)) for k, m in enumerate(self.parts)]

    # -- kernels ------------------------------------------------------------

    def exp(self, x, u):
        return self.join(self._map_parts(lambda m, a, b: m.exp(a, b), x, u))

    def log(self, x, y):
        return self.join(self._map_parts(lambda m, a, b: m.log(a, b), x, y))

    def dist(self, x, y):
        d2 = [m.dist(a, b) ** 2 for m, a, b in zip(self.parts, self.split(x), self.split(y))]
        return float(np.sqrt(sum(d2)))

    def inner(self, x, u, v):
        xs, us, vs = self.split(x), self.split(u), self.split(v)
        return float(sum(m.inner(a, b, c) for m, a, b, c in zip(self.parts, xs, us, vs)))

    def transport(self, g, h, u):
        return self.join(self._map_parts(lambda m, a, b, c: m.transport(a, b, c), g, h, u))

    def transport_map(self, g, h):
        A = np.zeros((self.dim, self.dim))
        gs, hs = self.split(g), self.split(h)
        for k, m in enumerate(self.parts):
            s = self._chart_slices[k]
            A[s, s] = m.transport_map(gs[k], hs[k])
        return A

    def chart_basis(self, x):
        rows = np.zeros((self.dim, self.ambient_dim))
        for k, (m, xp) in enumerate(zip(self.parts, self.split(x))):
            rows[self._chart_slices[k], self._amb_slices[k]] = m.chart_basis(xp)
        return rows

    def to_chart(self, x, u):
        xs, us = self.split(x), self.split(u)
        return np.concatenate(
            [m.to_chart(a, b) for m, a, b in zip(self.parts, xs, us)]
        )

    def from_chart(self, x, coords):
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (self.dim,):
            raise DimensionMismatchError(
                f"chart coordinates must have shape ({self.dim},), got {coords.shape}"
            )
        out = []
        for k, (m, xp) in enumerate(zip(self.parts, self.split(x))):
            out.append(m.from_chart(xp, coords[self._chart_slices[k]]))
        return self.join(out)

    def project(self, x):
        return self.join(self._map_parts(lambda m, a: m.project(a), x))

    def check_point(self, x, atol=1e-9):
        for m, xp in zip(self.parts, self.split(x)):
            m.check_point(xp, atol)

    def random_point(self, rng):
        return self.join([m.random_point(rng) for m in self.parts])

    def cut_distance(self):
        # a total chart norm below every part's cut keeps each part safe
        return min(m.cut_distance() for m in self.parts)

    def spec_string(self):
        inner = ",".join(m.spec_string() for m in self.parts)
        return f"product[{inner}]"
