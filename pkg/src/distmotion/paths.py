"""Path descriptors, the sup-metric on paths, and weighted families of paths.

A descriptor is a frozen, hashable value that can be evaluated in batch with
``trace(ts)``. Each one carries a Lipschitz constant valid for its space's
metric, which the sup-distance uses to certify an upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Callable, Iterable

import numpy as np

from .measure import FiniteSupportMeasure, MetricOracle, make_measure, pushforward
from .spaces import (TWO_PI, Circle, MetricGraph, MismatchedSpace, Product, RealProjective, Space,
                     Sphere, Torus, Wedge)

ENDPOINT_TOL = 1e-9
DEFAULT_SAMPLES = 64


class EndpointMismatch(ValueError):
    pass


class ParameterOutOfRange(ValueError):
    pass


def _floats(v) -> tuple:
    return tuple(float(x) for x in np.asarray(v, dtype=float).ravel())


class Path:
    space: Space

    @property
    def lipschitz(self) -> float:
        raise NotImplementedError

    def trace(self, ts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t: float) -> tuple:
        return eval_path(self, t)

    @cached_property
    def source(self) -> tuple:
        return self.space.point(self.trace(np.array([0.0]))[0])

    @cached_property
    def target(self) -> tuple:
        return self.space.point(self.trace(np.array([1.0]))[0])

    def to_json(self) -> dict:
        raise NotImplementedError


def eval_path(path: Path, t: float) -> tuple:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ParameterOutOfRange(f"t = {t} is outside [0, 1]")
    return path.space.point(path.trace(np.array([t]))[0])


@dataclass(frozen=True)
class Constant(Path):
    space: Space
    point: tuple

    @property
    def lipschitz(self):
        return 0.0

    def trace(self, ts):
        return np.tile(np.asarray(self.point, dtype=float), (len(ts), 1))

    def to_json(self):
        return {"kind": "constant", "point": list(self.point)}


@dataclass(frozen=True)
class GreatCircleArc(Path):
    """t -> cos(angle t) start + sin(angle t) direction, with direction a unit tangent at start."""

    space: Space
    start: tuple
    direction: tuple
    angle: float

    @property
    def lipschitz(self):
        return abs(self.angle)

    def trace(self, ts):
        a = self.angle * np.asarray(ts, dtype=float)[:, None]
        return np.cos(a) * np.asarray(self.start) + np.sin(a) * np.asarray(self.direction)

    def to_json(self):
        return {"kind": "arc", "start": list(self.start), "direction": list(self.direction),
                "angle": self.angle}


def arc(space: Space, start, direction, angle: float) -> Path:
    x = np.asarray(start, dtype=float)
    x = x / np.linalg.norm(x)
    v = np.asarray(direction, dtype=float)
    v = v - np.dot(v, x) * x
    nrm = np.linalg.norm(v)
    if nrm < 1e-12:
        raise ValueError("arc direction is parallel to the start point")
    if angle == 0:
        return Constant(space, space.point(x))
    return GreatCircleArc(space, _floats(x), _floats(v / nrm), float(angle))


@dataclass(frozen=True)
class LinearFlow(Path):
    """Straight-line motion in angle (circle) or flat coordinates (torus)."""

    space: Space
    start: tuple
    displacement: tuple

    @property
    def lipschitz(self):
        if isinstance(self.space, Circle):
            return self.space.radius * abs(self.displacement[0])
        return float(np.max(np.abs(self.displacement)))

    def trace(self, ts):
        ts = np.asarray(ts, dtype=float)[:, None]
        P = np.asarray(self.start) + ts * np.asarray(self.displacement)
        period = TWO_PI if isinstance(self.space, Circle) else 1.0
        return np.mod(P, period)

    def to_json(self):
        return {"kind": "linear", "start": list(self.start), "displacement": list(self.displacement)}


def linear_flow(space: Space, start, displacement) -> Path:
    if not isinstance(space, (Circle, Torus)):
        raise MismatchedSpace("linear flows live on circles and tori")
    d = _floats(displacement)
    if all(v == 0 for v in d):
        return Constant(space, space.point(start))
    return LinearFlow(space, space.point(start), d)


@dataclass(frozen=True)
class EdgeWalk(Path):
    """Constant-speed walk along ``segments`` = ((edge, t_from, t_to), ...)."""

    space: MetricGraph
    segments: tuple

    @cached_property
    def _lengths(self) -> np.ndarray:
        return np.array([abs(t1 - t0) * self.space.edges[e][2] for e, t0, t1 in self.segments])

    @property
    def lipschitz(self):
        return float(self._lengths.sum())

    def trace(self, ts):
        ts = np.asarray(ts, dtype=float)
        total = self._lengths.sum()
        cum = np.concatenate([[0.0], np.cumsum(self._lengths)])
        s = ts * total
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(self.segments) - 1)
        out = np.empty((len(ts), 2))
        for i, (kk, ss) in enumerate(zip(k, s)):
            e, t0, t1 = self.segments[kk]
            frac = 0.0 if self._lengths[kk] == 0 else min(max((ss - cum[kk]) / self._lengths[kk], 0.0), 1.0)
            out[i] = (e, t0 + (t1 - t0) * frac)
        return out

    def to_json(self):
        return {"kind": "edge_walk", "segments": [list(s) for s in self.segments]}


@dataclass(frozen=True)
class Concat(Path):
    left: Path
    right: Path

    def __post_init__(self):
        if self.left.space != self.right.space:
            raise MismatchedSpace("concatenated paths live in different spaces")
        gap = self.left.space.distance(self.left.target, self.right.source)
        if gap > ENDPOINT_TOL:
            raise EndpointMismatch(f"concatenation gap {gap:.3g}")

    @property
    def space(self):
        return self.left.space

    @property
    def lipschitz(self):
        return 2 * max(self.left.lipschitz, self.right.lipschitz)

    def trace(self, ts):
        ts = np.asarray(ts, dtype=float)
        out = np.empty((len(ts), self.space.dim))
        first = ts <= 0.5
        if first.any():
            out[first] = self.left.trace(2 * ts[first])
        if (~first).any():
            out[~first] = self.right.trace(2 * ts[~first] - 1)
        return out

    def to_json(self):
        return {"kind": "concat", "left": self.left.to_json(), "right": self.right.to_json()}


@dataclass(frozen=True)
class Reverse(Path):
    inner: Path

    @property
    def space(self):
        return self.inner.space

    @property
    def lipschitz(self):
        return self.inner.lipschitz

    def trace(self, ts):
        return self.inner.trace(1 - np.asarray(ts, dtype=float))

    def to_json(self):
        return {"kind": "reverse", "inner": self.inner.to_json()}


@dataclass(frozen=True)
class ProductPath(Path):
    space: Product
    parts: tuple

    @property
    def lipschitz(self):
        return max(p.lipschitz for p in self.parts)

    def trace(self, ts):
        return np.concatenate([p.trace(ts) for p in self.parts], axis=1)

    def to_json(self):
        return {"kind": "product", "parts": [p.to_json() for p in self.parts]}


class PointMap:
    """Lipschitz map between spaces acting row-wise on coordinate arrays."""

    source: Space
    target: Space

    @property
    def lipschitz(self) -> float:
        raise NotImplementedError

    def apply(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, p) -> tuple:
        return self.target.point(self.apply(np.asarray(p, dtype=float)[None, :])[0])

    def to_json(self) -> dict:
        return {"map": type(self).__name__}


@dataclass(frozen=True)
class Translation(PointMap):
    space: Space
    offset: tuple

    @property
    def source(self):
        return self.space

    @property
    def target(self):
        return self.space

    @property
    def lipschitz(self):
        return 1.0

    def apply(self, P):
        period = TWO_PI if isinstance(self.space, Circle) else 1.0
        return np.mod(P + np.asarray(self.offset), period)

    def to_json(self):
        return {"map": "translate", "offset": list(self.offset)}


@dataclass(frozen=True)
class AngleMap(PointMap):
    """theta -> theta + shift between circles of possibly different radii."""

    source: Circle
    target: Circle
    shift: float = 0.0

    @property
    def lipschitz(self):
        return self.target.radius / self.source.radius

    def apply(self, P):
        return np.mod(P + self.shift, TWO_PI)

    def to_json(self):
        return {"map": "angle", "shift": self.shift, "from_radius": self.source.radius,
                "to_radius": self.target.radius}


@dataclass(frozen=True)
class WedgeInclusion(PointMap):
    wedge: Wedge
    side: int

    @property
    def source(self):
        return self.wedge.left if self.side == 0 else self.wedge.right

    @property
    def target(self):
        return self.wedge

    @property
    def lipschitz(self):
        return 1.0

    def apply(self, P):
        n = len(P)
        w = self.wedge
        if self.side == 0:
            return np.concatenate([np.zeros((n, 1)), P, np.tile(w.right_base, (n, 1))], axis=1)
        return np.concatenate([np.ones((n, 1)), np.tile(w.left_base, (n, 1)), P], axis=1)

    def to_json(self):
        return {"map": "wedge_inclusion", "side": self.side}


@dataclass(frozen=True)
class WedgeRetraction(PointMap):
    """Onto one factor, collapsing the other factor to the wedge point."""

    wedge: Wedge
    side: int

    @property
    def source(self):
        return self.wedge

    @property
    def target(self):
        return self.wedge.left if self.side == 0 else self.wedge.right

    @property
    def lipschitz(self):
        return 1.0

    def apply(self, P):
        w = self.wedge
        nl = w.left.dim
        on_right = P[:, 0] >= 0.5
        if self.side == 0:
            out = np.array(P[:, 1: 1 + nl])
            out[on_right] = w.left_base
        else:
            out = np.array(P[:, 1 + nl:])
            out[~on_right] = w.right_base
        return out

    def to_json(self):
        return {"map": "wedge_retraction", "side": self.side}


@dataclass(frozen=True)
class FunctionMap(PointMap):
    """Map given by a row-wise callable; equality is by identity of the callable."""

    name: str
    source: Space
    target: Space
    func: Callable[[np.ndarray], np.ndarray]
    lip: float

    @property
    def lipschitz(self):
        return self.lip

    def apply(self, P):
        return self.func(P)

    def to_json(self):
        return {"map": self.name}


@dataclass(frozen=True)
class Mapped(Path):
    map: PointMap
    inner: Path

    def __post_init__(self):
        if self.inner.space != self.map.source:
            raise MismatchedSpace("map source does not match the path's space")

    @property
    def space(self):
        return self.map.target

    @property
    def lipschitz(self):
        return self.map.lipschitz * self.inner.lipschitz

    def trace(self, ts):
        return self.map.apply(self.inner.trace(ts))

    def to_json(self):
        return {"kind": "mapped", "map": self.map.to_json(), "inner": self.inner.to_json()}


def concat(left: Path, right: Path) -> Path:
    if isinstance(left, Constant) and isinstance(right, Constant) \
            and left.space.oracle.is_same(left.point, right.point):
        return left
    return Concat(left, right)


def reverse(path: Path) -> Path:
    if isinstance(path, Reverse):
        return path.inner
    if isinstance(path, Constant):
        return path
    return Reverse(path)


def product_path(space: Product, parts: Iterable[Path]) -> Path:
    parts = tuple(parts)
    if len(parts) != len(space.factors) or any(p.space != f for p, f in zip(parts, space.factors)):
        raise MismatchedSpace("product path parts do not match the factors")
    if all(isinstance(p, Constant) for p in parts):
        return Constant(space, space.join(p.point for p in parts))
    return ProductPath(space, parts)


def mapped_path(f: PointMap, path: Path) -> Path:
    if isinstance(path, Constant):
        return Constant(f.target, f.target.point(f.apply(np.asarray([path.point], dtype=float))[0]))
    return Mapped(f, path)


def geodesic(space: Space, x, y) -> Path:
    """Minimal geodesic on a sphere or projective space; linear flow on circle or torus."""
    if isinstance(space, (Sphere, RealProjective)):
        a, b = space.coords(x), space.coords(y)
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
        if isinstance(space, RealProjective) and np.dot(a, b) < 0:
            b = -b
        v = b - np.dot(a, b) * a
        ang = math.atan2(np.linalg.norm(v), float(np.dot(a, b)))
        if ang < 1e-15:
            return Constant(space, space.point(a))
        if np.linalg.norm(v) < 1e-12:
            raise ValueError("antipodal points have no unique geodesic")
        return GreatCircleArc(space, _floats(a), _floats(v / np.linalg.norm(v)), ang)
    if isinstance(space, Circle):
        d = (space.coords(y)[0] - space.coords(x)[0] + math.pi) % TWO_PI - math.pi
        return linear_flow(space, x, [d])
    if isinstance(space, Torus):
        d = np.mod(space.coords(y) - space.coords(x) + 0.5, 1.0) - 0.5
        return linear_flow(space, x, d)
    raise MismatchedSpace(f"no geodesic helper for {space.label}")


@lru_cache(maxsize=8192)
def _trace_grid(path: Path, samples: int) -> np.ndarray:
    return path.trace(np.linspace(0.0, 1.0, samples))


def path_sup_distance(phi: Path, psi: Path, samples: int = DEFAULT_SAMPLES) -> tuple[float, float]:
    """Certified bracket [lo, hi] of sup_t d(phi(t), psi(t))."""
    if phi.space != psi.space:
        raise MismatchedSpace("paths live in different spaces")
    if samples < 2:
        raise ValueError("need at least two samples")
    if phi == psi:
        return 0.0, 0.0
    d = phi.space.distances(_trace_grid(phi, samples), _trace_grid(psi, samples))
    lo = float(d.max())
    return lo, lo + (phi.lipschitz + psi.lipschitz) / (2 * (samples - 1))


@lru_cache(maxsize=None)
def path_oracle(space: Space, samples: int = DEFAULT_SAMPLES) -> MetricOracle:
    """Sup-metric on paths in ``space`` (certified upper bound), one shared carrier per space."""
    return MetricOracle(lambda a, b: path_sup_distance(a, b, samples)[1], name=f"P({space.label})")


def path_bounds(samples: int = DEFAULT_SAMPLES) -> Callable[[Path, Path], tuple[float, float]]:
    return lambda a, b: path_sup_distance(a, b, samples)


def sample_path(path: Path, samples: int = DEFAULT_SAMPLES) -> dict:
    ts = np.linspace(0.0, 1.0, samples)
    pts = path.space.canonical_rows(path.trace(ts))
    return {"t": [float(t) for t in ts], "points": [[float(v) for v in row] for row in pts]}


@dataclass(frozen=True)
class DistributedPath:
    """Weighted family of paths from ``source`` to ``target``.

    ``labels`` names the planner piece behind each atom (same order as the atoms).
    """

    measure: FiniteSupportMeasure
    source: tuple
    target: tuple
    labels: tuple = ()

    @property
    def space(self) -> Space:
        return self.measure.support[0].space

    @property
    def paths(self) -> list[Path]:
        return self.measure.support

    @property
    def weights(self) -> list[Fraction]:
        return self.measure.weights

    def __len__(self) -> int:
        return len(self.measure)

    def is_dirac_constant(self) -> bool:
        return len(self.measure) == 1 and isinstance(self.paths[0], Constant)

    def endpoint_error(self) -> float:
        sp = self.space
        return max(max(sp.distance(p.source, self.source), sp.distance(p.target, self.target))
                   for p in self.paths)

    def to_json(self, samples: int = DEFAULT_SAMPLES) -> dict:
        atoms = []
        for i, (p, w) in enumerate(self.measure.atoms):
            entry = {"w": str(w), "path": p.to_json(), "trace": sample_path(p, samples)}
            if self.labels:
                entry["piece"] = self.labels[i]
            atoms.append(entry)
        return {"source": list(self.source), "target": list(self.target), "atoms": atoms}


def distributed(space: Space, source, target, pieces: Iterable[tuple[Path, Any, str]]) -> DistributedPath:
    """Build a distributed path from (path, weight, label) triples, merging equal paths."""
    pieces = [(p, Fraction(w), lab) for p, w, lab in pieces if Fraction(w) != 0]
    labels: list[str] = []
    seen: list[Path] = []
    for p, _, lab in pieces:
        if p not in seen:
            seen.append(p)
            labels.append(lab)
    mu = make_measure(((p, w) for p, w, _ in pieces), path_oracle(space))
    return DistributedPath(mu, space.point(source), space.point(target), tuple(labels))


class FlatPath:
    """t -> sum of weights at the points phi(t): a path of point measures."""

    def __init__(self, dpath: DistributedPath):
        self.dpath = dpath
        self.space = dpath.space

    def __call__(self, t: float) -> FiniteSupportMeasure:
        t = float(t)
        if not 0.0 <= t <= 1.0:
            raise ParameterOutOfRange(f"t = {t} is outside [0, 1]")
        return pushforward(lambda p: eval_path(p, t), self.dpath.measure, self.space.oracle)

    def sample(self, samples: int = DEFAULT_SAMPLES) -> dict:
        ts = np.linspace(0.0, 1.0, samples)
        return {"t": [float(t) for t in ts],
                "measures": [self(t).to_json(id_of=list) for t in ts]}


def flatten(dpath: DistributedPath) -> FlatPath:
    return FlatPath(dpath)


def path_from_json(data: dict, space: Space) -> Path:
    """Rebuild a descriptor from its JSON form (maps limited to the data-only kinds)."""
    kind = data["kind"]
    if kind == "constant":
        return Constant(space, tuple(data["point"]))
    if kind == "arc":
        return GreatCircleArc(space, tuple(data["start"]), tuple(data["direction"]), float(data["angle"]))
    if kind == "linear":
        return LinearFlow(space, tuple(data["start"]), tuple(data["displacement"]))
    if kind == "edge_walk":
        return EdgeWalk(space, tuple(tuple(s) for s in data["segments"]))
    if kind == "concat":
        return Concat(path_from_json(data["left"], space), path_from_json(data["right"], space))
    if kind == "reverse":
        return Reverse(path_from_json(data["inner"], space))
    if kind == "product":
        return ProductPath(space, tuple(path_from_json(p, f) for p, f in zip(data["parts"], space.factors)))
    raise ValueError(f"cannot rebuild path kind {kind!r} from JSON")
