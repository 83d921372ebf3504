"""Model metric spaces.

Points are tuples of floats. Every space offers a scalar ``distance`` and a
row-wise ``distances`` over coordinate arrays, plus ``from_unit`` and
``perturb`` for low-discrepancy sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.special import ndtri

from .measure import MetricOracle

MERGE_TOL = 1e-12
TWO_PI = 2 * math.pi


class MismatchedSpace(ValueError):
    pass


class Space:
    dim: int
    n_params: int

    def coords(self, p) -> np.ndarray:
        a = np.asarray(p, dtype=float)
        if a.shape != (self.dim,):
            raise MismatchedSpace(f"{self.label} expects {self.dim} coordinates, got shape {a.shape}")
        return a

    def point(self, p) -> tuple:
        return tuple(float(v) for v in self.canonical_rows(self.coords(p)[None, :])[0])

    def canonical_rows(self, P: np.ndarray) -> np.ndarray:
        return P

    def distance(self, p, q) -> float:
        return float(self.distances(self.coords(p)[None, :], self.coords(q)[None, :])[0])

    def distances(self, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def from_unit(self, u) -> tuple:
        raise NotImplementedError

    def perturb(self, p, r: float, u) -> tuple:
        """A point within distance ``r`` of ``p``; ``u`` in [0,1)^n_params picks the direction."""
        raise NotImplementedError

    @property
    def label(self) -> str:
        return type(self).__name__

    def to_json(self) -> dict:
        raise NotImplementedError

    @cached_property
    def oracle(self) -> MetricOracle:
        return MetricOracle(self.distance, same=lambda a, b: self.distance(a, b) <= MERGE_TOL,
                            name=self.label)


def _gauss(u) -> np.ndarray:
    return ndtri(np.clip(np.asarray(u, dtype=float), 1e-12, 1 - 1e-12))


def _sphere_angles(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    dots = np.einsum("ij,ij->i", P, Q)
    cross = np.linalg.norm(Q - dots[:, None] * P, axis=1)
    return np.arctan2(cross, dots)


@dataclass(frozen=True)
class Circle(Space):
    """Round circle of the given radius; a point is its angle in [0, 2pi)."""

    radius: float = 1.0

    dim = 1
    n_params = 1

    def canonical_rows(self, P):
        return np.mod(P, TWO_PI)

    def distances(self, P, Q):
        d = np.abs(np.mod(P[:, 0] - Q[:, 0], TWO_PI))
        return self.radius * np.minimum(d, TWO_PI - d)

    def from_unit(self, u):
        return self.point([TWO_PI * float(u[0])])

    def perturb(self, p, r, u):
        step = (2 * float(u[0]) - 1) * r / self.radius
        return self.point([p[0] + step])

    @property
    def label(self):
        return "Circle" if self.radius == 1 else f"Circle(r={self.radius:g})"

    def to_json(self):
        return {"type": "circle", "radius": self.radius}


@dataclass(frozen=True)
class Sphere(Space):
    n: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("sphere dimension must be >= 1")

    @property
    def dim(self):
        return self.n + 1

    @property
    def n_params(self):
        return self.n + 1

    def canonical_rows(self, P):
        return P / np.linalg.norm(P, axis=1, keepdims=True)

    def distances(self, P, Q):
        return _sphere_angles(P, Q)

    def from_unit(self, u):
        return self.point(_gauss(u))

    def _tangent(self, x, u):
        g = _gauss(u)
        g = g - np.dot(g, x) * x
        nrm = np.linalg.norm(g)
        if nrm < 1e-12:
            g = _any_orthogonal(x)
            nrm = 1.0
        return g / nrm

    def perturb(self, p, r, u):
        x = self.coords(p)
        v = self._tangent(x, u)
        return self.point(math.cos(r) * x + math.sin(r) * v)

    @property
    def label(self):
        return f"S{self.n}"

    def to_json(self):
        return {"type": "sphere", "n": self.n}


def _any_orthogonal(x: np.ndarray) -> np.ndarray:
    k = int(np.argmin(np.abs(x)))
    e = np.zeros_like(x)
    e[k] = 1.0
    v = e - np.dot(e, x) * x
    return v / np.linalg.norm(v)


def canonical_sign(P: np.ndarray) -> np.ndarray:
    """Flip rows so the first coordinate that is not ~0 is positive."""
    P = np.array(P, dtype=float)
    nz = np.abs(P) > 1e-12
    first = np.argmax(nz, axis=1)
    signs = np.sign(P[np.arange(len(P)), first])
    signs[signs == 0] = 1.0
    return P * signs[:, None]


@dataclass(frozen=True)
class RealProjective(Space):
    n: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("projective dimension must be >= 1")

    @property
    def dim(self):
        return self.n + 1

    @property
    def n_params(self):
        return self.n + 1

    def canonical_rows(self, P):
        return canonical_sign(P / np.linalg.norm(P, axis=1, keepdims=True))

    def distances(self, P, Q):
        dots = np.abs(np.einsum("ij,ij->i", P, Q))
        signed = np.einsum("ij,ij->i", P, Q)
        cross = np.linalg.norm(Q - signed[:, None] * P, axis=1)
        return np.arctan2(cross, dots)

    def from_unit(self, u):
        return self.point(_gauss(u))

    def perturb(self, p, r, u):
        x = self.coords(p)
        v = Sphere(self.n)._tangent(x, u)
        return self.point(math.cos(r) * x + math.sin(r) * v)

    @property
    def label(self):
        return f"RP{self.n}"

    def to_json(self):
        return {"type": "projective", "n": self.n}


@dataclass(frozen=True)
class Torus(Space):
    """Flat torus R^m / Z^m with the max metric."""

    m: int = 2

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("torus dimension must be >= 1")

    @property
    def dim(self):
        return self.m

    @property
    def n_params(self):
        return self.m

    def canonical_rows(self, P):
        P = np.mod(P, 1.0)
        P[P >= 1.0] = 0.0
        return P

    def distances(self, P, Q):
        d = np.abs(np.mod(P - Q, 1.0))
        return np.max(np.minimum(d, 1.0 - d), axis=1)

    def from_unit(self, u):
        return self.point(np.asarray(u, dtype=float)[: self.m])

    def perturb(self, p, r, u):
        v = 2 * np.asarray(u, dtype=float)[: self.m] - 1
        top = np.max(np.abs(v))
        if top > 0:
            v = v / top
        return self.point(self.coords(p) + r * v)

    @property
    def label(self):
        return f"T{self.m}"

    def to_json(self):
        return {"type": "torus", "m": self.m}


@dataclass(frozen=True)
class MetricGraph(Space):
    """Connected metric graph. A point is (edge index, t) with t in [0, 1] along the edge."""

    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    dim = 2
    n_params = 2

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b), float(L)) for a, b, L in self.edges))
        if not self.edges:
            raise ValueError("graph needs at least one edge")
        for a, b, L in self.edges:
            if L <= 0:
                raise ValueError("edge lengths must be positive")
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ValueError("edge endpoint out of range")
        if connected_components(self._adjacency, directed=False)[0] != 1:
            raise ValueError("graph must be connected")

    @cached_property
    def _adjacency(self):
        rows = [a for a, b, _ in self.edges] + [b for a, b, _ in self.edges]
        cols = [b for a, b, _ in self.edges] + [a for a, b, _ in self.edges]
        vals = [L for *_, L in self.edges] * 2
        return csr_matrix((vals, (rows, cols)), shape=(self.n_vertices, self.n_vertices))

    @cached_property
    def vertex_distances(self) -> np.ndarray:
        return shortest_path(self._adjacency, method="D", directed=False)

    def is_tree(self) -> bool:
        return len(self.edges) == self.n_vertices - 1

    def canonical_rows(self, P):
        P = np.array(P, dtype=float)
        P[:, 0] = np.round(P[:, 0])
        P[:, 1] = np.clip(P[:, 1], 0.0, 1.0)
        return P

    def vertex_point(self, v: int) -> tuple:
        for i, (a, b, _) in enumerate(self.edges):
            if a == v:
                return (float(i), 0.0)
            if b == v:
                return (float(i), 1.0)
        raise ValueError(f"vertex {v} has no edges")

    def _ends(self, p):
        e = int(round(p[0]))
        a, b, L = self.edges[e]
        t = float(p[1])
        return e, ((a, t * L), (b, (1 - t) * L)), L, t

    def distances(self, P, Q):
        out = np.empty(len(P))
        D = self.vertex_distances
        for k, (p, q) in enumerate(zip(P, Q)):
            ep, ends_p, L, tp = self._ends(p)
            eq, ends_q, _, tq = self._ends(q)
            best = abs(tp - tq) * L if ep == eq else math.inf
            for va, da in ends_p:
                for vb, db in ends_q:
                    best = min(best, da + D[va, vb] + db)
            out[k] = best
        return out

    def from_unit(self, u):
        e = min(int(float(u[0]) * len(self.edges)), len(self.edges) - 1)
        return (float(e), float(u[1]))

    def perturb(self, p, r, u):
        # move along the current edge, stopping at its ends
        e, _, L, t = self._ends(p)
        step = (2 * float(u[0]) - 1) * r / L
        return (float(e), float(min(max(t + step, 0.0), 1.0)))

    @property
    def label(self):
        return f"Graph(V={self.n_vertices},E={len(self.edges)})"

    def to_json(self):
        return {"type": "graph", "vertices": self.n_vertices, "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class Product(Space):
    factors: tuple[Space, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("product needs at least one factor")

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    @property
    def n_params(self):
        return sum(f.n_params for f in self.factors)

    @cached_property
    def _slices(self):
        out, k = [], 0
        for f in self.factors:
            out.append(slice(k, k + f.dim))
            k += f.dim
        return out

    @cached_property
    def _param_slices(self):
        out, k = [], 0
        for f in self.factors:
            out.append(slice(k, k + f.n_params))
            k += f.n_params
        return out

    def split(self, p) -> list[tuple]:
        a = self.coords(p)
        return [tuple(a[s]) for s in self._slices]

    def join(self, parts) -> tuple:
        return tuple(float(v) for part in parts for v in part)

    def canonical_rows(self, P):
        return np.concatenate([f.canonical_rows(P[:, s]) for f, s in zip(self.factors, self._slices)], axis=1)

    def distances(self, P, Q):
        return np.max(np.stack([f.distances(P[:, s], Q[:, s]) for f, s in zip(self.factors, self._slices)]),
                      axis=0)

    def from_unit(self, u):
        u = np.asarray(u, dtype=float)
        return self.join(f.from_unit(u[s]) for f, s in zip(self.factors, self._param_slices))

    def perturb(self, p, r, u):
        u = np.asarray(u, dtype=float)
        parts = self.split(p)
        return self.join(f.perturb(x, r, u[s]) for f, x, s in zip(self.factors, parts, self._param_slices))

    @property
    def label(self):
        return "x".join(f.label for f in self.factors)

    def to_json(self):
        return {"type": "product", "factors": [f.to_json() for f in self.factors]}


@dataclass(frozen=True)
class Wedge(Space):
    """One-point union. Coordinates are [side, left coords..., right coords...]
    with side 0 or 1; the unused block holds that factor's basepoint."""

    left: Space
    right: Space
    left_base: tuple
    right_base: tuple

    def __post_init__(self):
        object.__setattr__(self, "left_base", self.left.point(self.left_base))
        object.__setattr__(self, "right_base", self.right.point(self.right_base))

    @property
    def dim(self):
        return 1 + self.left.dim + self.right.dim

    @property
    def n_params(self):
        return 1 + max(self.left.n_params, self.right.n_params)

    @property
    def basepoint(self) -> tuple:
        return self.include(0, self.left_base)

    def include(self, side: int, p) -> tuple:
        if side == 0:
            return self.point((0.0, *p, *self.right_base))
        return self.point((1.0, *self.left_base, *p))

    def side_of(self, p) -> tuple[int, tuple]:
        a = self.coords(p)
        if a[0] < 0.5:
            return 0, tuple(a[1: 1 + self.left.dim])
        return 1, tuple(a[1 + self.left.dim:])

    def canonical_rows(self, P):
        P = np.array(P, dtype=float)
        nl = self.left.dim
        L = self.left.canonical_rows(P[:, 1: 1 + nl])
        R = self.right.canonical_rows(P[:, 1 + nl:])
        side = (P[:, 0] >= 0.5).astype(float)
        at_base = (side == 1) & (self.right.distances(R, np.tile(self.right_base, (len(P), 1))) <= MERGE_TOL)
        side[at_base] = 0.0
        L[side == 1] = self.left_base
        R[side == 0] = self.right_base
        return np.concatenate([side[:, None], L, R], axis=1)

    def distances(self, P, Q):
        nl = self.left.dim
        sp, sq = P[:, 0] >= 0.5, Q[:, 0] >= 0.5
        PL, PR = P[:, 1: 1 + nl], P[:, 1 + nl:]
        QL, QR = Q[:, 1: 1 + nl], Q[:, 1 + nl:]
        # off-side blocks sit at the basepoint, so the through-basepoint sum is uniform
        cross = self.left.distances(PL, QL) + self.right.distances(PR, QR)
        same_l = self.left.distances(PL, QL)
        same_r = self.right.distances(PR, QR)
        return np.where(sp == sq, np.where(sp, same_r, same_l), cross)

    def from_unit(self, u):
        u = np.asarray(u, dtype=float)
        if u[0] < 0.5:
            return self.include(0, self.left.from_unit(u[1: 1 + self.left.n_params]))
        return self.include(1, self.right.from_unit(u[1: 1 + self.right.n_params]))

    def perturb(self, p, r, u):
        u = np.asarray(u, dtype=float)
        side, q = self.side_of(p)
        f = self.left if side == 0 else self.right
        return self.include(side, f.perturb(q, r, u[1: 1 + f.n_params]))

    @property
    def label(self):
        return f"{self.left.label}v{self.right.label}"

    def to_json(self):
        return {"type": "wedge", "left": self.left.to_json(), "right": self.right.to_json(),
                "left_base": list(self.left_base), "right_base": list(self.right_base)}


def default_basepoint(space: Space) -> tuple:
    if isinstance(space, (Sphere, RealProjective)):
        e = np.zeros(space.dim)
        e[0] = 1.0
        return space.point(e)
    if isinstance(space, (Circle, Torus)):
        return space.point(np.zeros(space.dim))
    if isinstance(space, MetricGraph):
        return space.vertex_point(0)
    if isinstance(space, Product):
        return space.join(default_basepoint(f) for f in space.factors)
    if isinstance(space, Wedge):
        return space.basepoint
    raise MismatchedSpace(f"no basepoint for {space.label}")


def space_from_json(spec) -> Space:
    kind = spec.get("type")
    if kind == "circle":
        return Circle(float(spec.get("radius", 1.0)))
    if kind == "sphere":
        return Sphere(int(spec["n"]))
    if kind == "projective":
        return RealProjective(int(spec["n"]))
    if kind == "torus":
        return Torus(int(spec.get("m", 2)))
    if kind == "graph":
        edges = [tuple(e) if len(e) == 3 else (e[0], e[1], 1.0) for e in spec["edges"]]
        n = spec.get("vertices", 1 + max(max(a, b) for a, b, _ in edges))
        return MetricGraph(int(n), tuple(edges))
    if kind == "product":
        return Product(tuple(space_from_json(f) for f in spec["factors"]))
    if kind == "wedge":
        left, right = space_from_json(spec["left"]), space_from_json(spec["right"])
        return Wedge(left, right, tuple(spec.get("left_base", default_basepoint(left))),
                     tuple(spec.get("right_base", default_basepoint(right))))
    raise ValueError(f"unknown space type {kind!r}")
