"""Parsing and formatting of manifold description strings.

Grammar (whitespace-free):

    euclidean:D | sphere:D | hyperbolic:D | spd:N | grassmann:D,P
    product[SPEC,SPEC,...]      (may nest; nesting flattens)
"""

from .base import Manifold
from .euclidean import Euclidean
from .grassmann import Grassmann
from .hyperbolic import Hyperbolic
from .product import Product
from .sphere import Sphere
from .spd import SPD


class SpecParseError(ValueError):
    """Malformed manifold description string."""


def make_manifold(spec):
    """Build a manifold from its description string (or pass one through)."""
    if isinstance(spec, Manifold):
        return spec
    if not isinstance(spec, str):
        raise SpecParseError(f"expected a manifold or description string, got {spec!r}")
    text = spec.strip().replace(" ", "")
    mani, rest = _parse(text)
    if rest:
        raise SpecParseError(f"trailing characters {rest!r} in manifold spec {spec!r}")
    return mani


def _parse(text):
    if text.startswith("product["):
        rest = text[len("product["):]
        parts = []
        while True:
            if not rest:
                raise SpecParseError("unterminated product[...] spec")
            part, rest = _parse(rest)
            parts.append(part)
            if rest.startswith(","):
                rest = rest[1:]
                continue
            if rest.startswith("]"):
                return Product(parts), rest[1:]
            raise SpecParseError(f"expected ',' or ']' at {rest!r}")
    for stop, ch in enumerate(text):
        if ch in ",]":
            head, tail = text[:stop], text[stop:]
            break
    else:
        head, tail = text, ""
    if ":" not in head:
        raise SpecParseError(f"missing ':<dims>' in {head!r}")
    kind, _, dims = head.partition(":")
    try:
        if kind == "euclidean":
            return Euclidean(int(dims)), tail
        if kind == "sphere":
            return Sphere(int(dims)), tail
        if kind == "hyperbolic":
            return Hyperbolic(int(dims)), tail
        if kind == "spd":
            return SPD(int(dims)), tail
        if kind == "grassmann":
            d, _, p = dims.partition(",")
            # grassmann consumes its second integer from the tail when the
            # spec appears inside a product list
            if not p:
                if not tail.startswith(","):
                    raise SpecParseError(f"grassmann spec needs 'd,p', got {head!r}")
                tail2 = tail[1:]
                for stop, ch in enumerate(tail2):
                    if ch in ",]":
                        p, tail = tail2[:stop], tail2[stop:]
                        break
                else:
                    p, tail = tail2, ""
            return Grassmann(int(d), int(p)), tail
    except SpecParseError:
        raise
    except ValueError as exc:
        raise SpecParseError(f"bad dimensions in manifold spec {head!r}: {exc}") from exc
    raise SpecParseError(f"unknown manifold kind {kind!r}")
