"""Triangulations of the model spaces used throughout the package."""

from __future__ import annotations

import itertools
from functools import reduce

from .homology import SimplicialComplex, product_complex

# Kuhnel's 9-vertex complex projective plane, vertices shifted to 0..8.
_CP2 = [
    [1, 2, 3, 4, 5], [1, 2, 3, 4, 7], [1, 2, 3, 5, 8], [1, 2, 3, 7, 8], [1, 2, 4, 5, 6],
    [1, 2, 4, 6, 7], [1, 2, 5, 6, 8], [1, 2, 6, 7, 9], [1, 2, 6, 8, 9], [1, 2, 7, 8, 9],
    [1, 3, 4, 5, 9], [1, 3, 4, 7, 8], [1, 3, 4, 8, 9], [1, 3, 5, 6, 8], [1, 3, 5, 6, 9],
    [1, 3, 6, 8, 9], [1, 4, 5, 6, 7], [1, 4, 5, 7, 9], [1, 4, 7, 8, 9], [1, 5, 6, 7, 9],
    [2, 3, 4, 5, 9], [2, 3, 4, 6, 7], [2, 3, 4, 6, 9], [2, 3, 5, 7, 8], [2, 3, 5, 7, 9],
    [2, 3, 6, 7, 9], [2, 4, 5, 6, 8], [2, 4, 5, 8, 9], [2, 4, 6, 8, 9], [2, 5, 7, 8, 9],
    [3, 4, 6, 7, 8], [3, 4, 6, 8, 9], [3, 5, 6, 7, 8], [3, 5, 6, 7, 9], [4, 5, 6, 7, 8],
    [4, 5, 7, 8, 9],
]

# genus-2 surface, f = (10, 36, 24): connected sum of two 7-vertex tori
# followed by edge flips and one link-condition edge contraction
_SIGMA2 = [
    [0, 1, 2], [0, 1, 4], [0, 2, 3], [0, 3, 6], [0, 4, 5], [0, 5, 8], [0, 6, 9], [0, 7, 8],
    [0, 7, 9], [1, 2, 7], [1, 3, 4], [1, 3, 5], [1, 5, 8], [1, 6, 7], [1, 6, 9], [1, 8, 9],
    [2, 3, 5], [2, 4, 5], [2, 4, 7], [3, 4, 7], [3, 6, 8], [3, 7, 9], [3, 8, 9], [6, 7, 8],
]

_RP2 = [
    [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
    [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
]


def point() -> SimplicialComplex:
    return SimplicialComplex(1, [[0]])


def two_points() -> SimplicialComplex:
    return SimplicialComplex(2, [[0], [1]])


def circle() -> SimplicialComplex:
    return SimplicialComplex(3, [[0, 1], [1, 2], [0, 2]])


def sphere(n: int) -> SimplicialComplex:
    """Boundary of the (n+1)-simplex."""
    return SimplicialComplex(n + 2, itertools.combinations(range(n + 2), n + 1))


def torus() -> SimplicialComplex:
    """Moebius' 7-vertex torus."""
    tris = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
    tris += [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]
    return SimplicialComplex(7, tris)


def genus2() -> SimplicialComplex:
    return SimplicialComplex(10, _SIGMA2)


def rp2() -> SimplicialComplex:
    return SimplicialComplex(6, _RP2)


def cp2() -> SimplicialComplex:
    return SimplicialComplex(9, [[v - 1 for v in s] for s in _CP2])


def bouquet(k: int) -> SimplicialComplex:
    """Wedge of k triangles at vertex 0."""
    edges = []
    for i in range(k):
        a, b = 2 * i + 1, 2 * i + 2
        edges += [[0, a], [a, b], [0, b]]
    return SimplicialComplex(2 * k + 1, edges)


def figure_eight() -> SimplicialComplex:
    return bouquet(2)


def sphere_product(dims) -> SimplicialComplex:
    return reduce(product_complex, [sphere(n) for n in dims])


FIXTURES = {
    "point": point,
    "two_points": two_points,
    "S1": circle,
    "S2": lambda: sphere(2),
    "S3": lambda: sphere(3),
    "T2": torus,
    "Sigma2": genus2,
    "RP2": rp2,
    "CP2": cp2,
    "figure8": figure_eight,
    "S1xS2": lambda: sphere_product([1, 2]),
    "T3": lambda: sphere_product([1, 1, 1]),
}


def fixture(name: str) -> SimplicialComplex:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None
