"""Distributed navigation algorithms, distributed contractions and their combinators."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable

import networkx as nx
import numpy as np

from .paths import (Constant, DistributedPath, EdgeWalk, Path, Translation, WedgeInclusion, WedgeRetraction, arc,
                    concat, distributed, geodesic, linear_flow, mapped_path, product_path, reverse)
from .spaces import (TWO_PI, Circle, MetricGraph, MismatchedSpace, Product, RealProjective, Space, Sphere,
                     Torus, Wedge, _any_orthogonal, default_basepoint)

WEIGHT_DENOMINATOR = 10**12
LIFT_STEPS = 256


class SpaceNotGroup(ValueError):
    pass


class LiftStepTooCoarse(ValueError):
    pass


def rational(w: float) -> Fraction:
    """Exact weight from a float in [0, 1]."""
    return Fraction(min(max(float(w), 0.0), 1.0)).limit_denominator(WEIGHT_DENOMINATOR)


def ramp(v: float, lo: float, hi: float) -> float:
    return min(max((v - lo) / (hi - lo), 0.0), 1.0)


@dataclass(frozen=True, eq=False)
class Planner:
    name: str
    space: Space
    pieces: int
    rule_fn: Callable[[tuple, tuple], DistributedPath]
    domains: dict = field(default_factory=dict)
    config: object = None

    def rule(self, x, y) -> DistributedPath:
        return self.rule_fn(self.space.point(x), self.space.point(y))

    __call__ = rule


@dataclass(frozen=True, eq=False)
class Contraction:
    name: str
    space: Space
    basepoint: tuple
    pieces: int
    rule_fn: Callable[[tuple], DistributedPath]
    domains: dict = field(default_factory=dict)

    def rule(self, x) -> DistributedPath:
        return self.rule_fn(self.space.point(x))

    __call__ = rule


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def _angle(x: np.ndarray, y: np.ndarray) -> float:
    d = float(np.dot(x, y))
    return math.atan2(float(np.linalg.norm(y - d * x)), d)


# ---------------------------------------------------------------- projective space

def rpn_planner(n: int) -> Planner:
    """Two rotations in the plane of the lines: by the small angle a (weight 1 - a/pi)
    and the other way round by pi - a (weight a/pi)."""
    space = RealProjective(n)

    def rule(x, y):
        a, b = np.asarray(x), np.asarray(y)
        if np.dot(a, b) < 0:
            b = -b
        alpha = _angle(a, b)
        if alpha < 1e-12:
            return distributed(space, x, y, [(Constant(space, x), 1, "constant")])
        u = _unit(b - np.dot(a, b) * a)
        w = rational(alpha / math.pi)
        short = arc(space, a, u, alpha)
        long = arc(space, a, -u, math.pi - alpha)
        return distributed(space, x, y, [(short, 1 - w, "rot_small"), (long, w, "rot_large")])

    def distinct(x, y):
        return space.distance(x, y) > 1e-12

    return Planner(f"rpn{n}", space, 2, rule, {"rot_small": distinct, "rot_large": distinct})


# ---------------------------------------------------------------- circle

def _circle_splits(x: float, y: float, period: float) -> list[tuple[float, Fraction]]:
    """(displacement, weight): ccw by theta with weight 1 - theta/period, cw by period - theta."""
    theta = (y - x) % period
    if theta == 0 or period - theta < 1e-15:
        return [(0.0, Fraction(1))]
    w = rational(theta / period)
    return [(theta, 1 - w), (theta - period, w)]


def circle_planner(radius: float = 1.0) -> Planner:
    space = Circle(radius)

    def rule(x, y):
        parts = _circle_splits(x[0], y[0], TWO_PI)
        labels = ["ccw", "cw"] if len(parts) == 2 else ["constant"]
        return distributed(space, x, y, [(linear_flow(space, x, [d]), w, lab)
                                         for (d, w), lab in zip(parts, labels)])

    return Planner("circle" if radius == 1 else f"circle_r{radius:g}", space, 2, rule)


def circle_contraction(radius: float = 1.0) -> Contraction:
    return contraction_from_planner(circle_planner(radius), (0.0,), name="circle_contraction")


# ---------------------------------------------------------------- spheres

@dataclass(frozen=True)
class Ramp:
    """Weight ramp on ``on`` = "angle" (d(x, y)) or "inner" (-<x, y>) from ``lo`` (0) to ``hi`` (1)."""

    lo: float
    hi: float
    on: str = "angle"

    def __call__(self, x: np.ndarray, y: np.ndarray) -> float:
        v = _angle(x, y) if self.on == "angle" else -float(np.dot(x, y))
        return ramp(v, self.lo, self.hi)


# ramp centred on the equator d(x, y) = pi/2, where both pieces are well conditioned
ANTIPODAL_RAMP = Ramp(math.pi / 2 - 0.8, math.pi / 2 + 0.8)
# thresholds 1/2, 3/4 on -<x, y>, kept for comparison
INNER_RAMP = Ramp(0.5, 0.75, on="inner")


def odd_tangent_field(x: np.ndarray) -> np.ndarray:
    v = np.empty_like(x)
    v[0::2] = -x[1::2]
    v[1::2] = x[0::2]
    return v


def _via_antipode(space: Space, x: np.ndarray, field_dir: np.ndarray, y: np.ndarray) -> Path:
    half = arc(space, x, field_dir, math.pi)
    return concat(half, geodesic(space, half.target, y))


def odd_sphere_planner(n: int, config: Ramp = ANTIPODAL_RAMP) -> Planner:
    if n % 2 == 0:
        raise ValueError("odd_sphere_planner needs odd n")
    space = Sphere(n)

    def rule(x, y):
        a, b = np.asarray(x), np.asarray(y)
        wb = rational(config(a, b))
        pieces = []
        if wb < 1:
            pieces.append((geodesic(space, a, b), 1 - wb, "direct"))
        if wb > 0:
            pieces.append((_via_antipode(space, a, odd_tangent_field(a), b), wb, "via_antipode"))
        return distributed(space, x, y, pieces)

    domains = {
        "direct": lambda x, y: float(np.dot(x, y)) > -1 + 1e-12,
        "via_antipode": lambda x, y: float(np.dot(x, y)) < 1 - 1e-12,
    }
    return Planner(f"odd_sphere{n}", space, 2, rule, domains, config)


def one_zero_field(x: np.ndarray, pole: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Unit tangent field on S^n vanishing only at ``pole`` (c is a unit vector orthogonal to it).

    It is a constant field of the plane pulled back by stereographic projection from the pole.
    """
    cx = float(np.dot(c, x))
    return c - cx * (x - pole) / (1.0 - float(np.dot(x, pole)))


@dataclass(frozen=True)
class EvenSphereConfig:
    antipodal: Ramp = ANTIPODAL_RAMP
    # pole weight q as a function of d(x, e1): 1 up to pole_near, 0 from pole_far on
    pole_near: float = 1.0
    pole_far: float = 1.55
    # "one_zero": pieces B and C follow fields vanishing only at e1 and -e1.
    # "literal": B follows the e1-component field, C runs geodesic to the pole,
    # fixed semicircle through e2, geodesic to y.
    route: str = "one_zero"


LITERAL_EVEN_CONFIG = EvenSphereConfig(pole_near=0.45, pole_far=1.45, route="literal")
# splits the pole weight at the equator; smoother, but x orthogonal to e1 gets weight 1/2 on each route
EQUATOR_SPLIT_CONFIG = EvenSphereConfig(pole_near=1.2, pole_far=math.pi - 1.2)


def even_sphere_planner(n: int, config: EvenSphereConfig = EvenSphereConfig()) -> Planner:
    """Pieces: direct geodesic ("direct"), a route through -x for antipodal-ish pairs away
    from e1 ("field"), and one for x near e1 ("pole")."""
    if n % 2 == 1:
        raise ValueError("even_sphere_planner needs even n")
    if config.route not in ("one_zero", "literal"):
        raise ValueError(f"unknown route {config.route!r}")
    literal = config.route == "literal"
    space = Sphere(n)
    e = np.zeros(n + 1)
    e[0] = 1.0
    f = np.zeros(n + 1)
    f[1] = 1.0

    def pole_weight(a):
        c = float(a[0])
        phi = math.acos(min(abs(c), 1.0)) if literal else math.acos(min(max(c, -1.0), 1.0))
        return 1.0 - ramp(phi, config.pole_near, config.pole_far)

    def field_path(a, b):
        v = e - a[0] * a if literal else one_zero_field(a, e, f)
        return _via_antipode(space, a, v, b)

    def pole_path(a, b):
        if not literal:
            return _via_antipode(space, a, one_zero_field(a, -e, f), b)
        pole = (1.0 if a[0] >= 0 else -1.0) * e
        ref = arc(space, pole, f, math.pi)
        return concat(concat(geodesic(space, a, pole), ref), geodesic(space, ref.target, b))

    def rule(x, y):
        a, b = np.asarray(x), np.asarray(y)
        r = rational(config.antipodal(a, b))
        q = rational(pole_weight(a))
        pieces = []
        if r < 1:
            pieces.append((geodesic(space, a, b), 1 - r, "direct"))
        if r > 0 and q < 1:
            pieces.append((field_path(a, b), r * (1 - q), "field"))
        if r > 0 and q > 0:
            pieces.append((pole_path(a, b), r * q, "pole"))
        return distributed(space, x, y, pieces)

    def not_diag(x, y):
        return float(np.dot(x, y)) < 1 - 1e-12

    def field_ok(x, y):
        bad = abs(float(x[0])) if literal else float(x[0])
        return bad < 1 - 1e-12 and not_diag(x, y)

    def pole_ok(x, y):
        if not literal:
            return float(x[0]) > -1 + 1e-12 and not_diag(x, y)
        sigma = 1.0 if x[0] >= 0 else -1.0
        return abs(float(x[0])) > 1e-12 and sigma * float(y[0]) < 1 - 1e-12

    domains = {"direct": lambda x, y: float(np.dot(x, y)) > -1 + 1e-12, "field": field_ok, "pole": pole_ok}
    return Planner(f"even_sphere{n}", space, 3, rule, domains, config)


def sphere_planner(n: int) -> Planner:
    return odd_sphere_planner(n) if n % 2 else even_sphere_planner(n)


# ---------------------------------------------------------------- torus and groups

def torus_contraction(m: int) -> Contraction:
    """Product of per-coordinate ccw/cw splits to the origin; up to 2^m pieces."""
    space = Torus(m)
    base = space.point(np.zeros(m))

    def rule(x):
        combos = [((), Fraction(1))]
        for xi in x:
            parts = _circle_splits(xi, 0.0, 1.0)
            combos = [(d + (di,), w * wi) for d, w in combos for di, wi in parts]
        return distributed(space, x, base, [(linear_flow(space, x, d), w, "flow") for d, w in combos])

    return Contraction(f"torus_contraction{m}", space, base, 2**m, rule)


def group_translation_planner(H: Contraction) -> Planner:
    """(x, y) -> y H(y^-1 x): translate the contraction of x - y by y."""
    space = H.space
    if not isinstance(space, (Torus, Circle)):
        raise SpaceNotGroup(f"{space.label} has no group structure here")
    period = TWO_PI if isinstance(space, Circle) else 1.0
    if space.distance(H.basepoint, np.zeros(space.dim)) > 1e-12:
        raise SpaceNotGroup("contraction must end at the identity")

    def rule(x, y):
        z = space.point(np.mod(np.asarray(x) - np.asarray(y), period))
        inner = H.rule(z)
        shift = Translation(space, tuple(float(v) for v in y))
        moved = [mapped_path(shift, p) for p in inner.paths]
        return distributed(space, x, y, list(zip(moved, inner.weights, inner.labels)))

    return Planner(f"translate[{H.name}]", space, H.pieces, rule)


# ---------------------------------------------------------------- products and contractions

def product_planner(p: Planner, q: Planner) -> Planner:
    space = Product((p.space, q.space))

    def rule(x, y):
        (x1, x2), (y1, y2) = space.split(x), space.split(y)
        a, b = p.rule(x1, y1), q.rule(x2, y2)
        pieces = []
        for pa, wa, la in zip(a.paths, a.weights, a.labels):
            for pb, wb, lb in zip(b.paths, b.weights, b.labels):
                pieces.append((product_path(space, (pa, pb)), wa * wb, f"{la}*{lb}"))
        return distributed(space, x, y, pieces)

    return Planner(f"{p.name}x{q.name}", space, p.pieces * q.pieces, rule)


def contraction_from_planner(s: Planner, x0, name: str | None = None) -> Contraction:
    base = s.space.point(x0)
    return Contraction(name or f"{s.name}@base", s.space, base, s.pieces, lambda x: s.rule(x, base), s.domains)


# ---------------------------------------------------------------- coverings

class Covering:
    total: Space
    base: Space
    # max base distance between consecutive tracking samples
    step_bound: float
    lift_lipschitz: float = 1.0
    trivial: bool = False

    def project(self, P: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def local_lift(self, B: np.ndarray, anchors: np.ndarray) -> np.ndarray:
        """Lift each base row to the sheet containing the matching anchor's neighbourhood."""
        raise NotImplementedError

    def fiber(self, b) -> list[tuple]:
        raise NotImplementedError

    def reference_path(self, p, x0) -> Path:
        raise NotImplementedError


@dataclass(frozen=True)
class DoubleCover(Covering):
    """S^n -> RP^n."""

    n: int

    @property
    def total(self):
        return Sphere(self.n)

    @property
    def base(self):
        return RealProjective(self.n)

    step_bound = math.pi / 4

    def project(self, P):
        return self.base.canonical_rows(P)

    def local_lift(self, B, anchors):
        s = np.sign(np.einsum("ij,ij->i", B, anchors))
        s[s == 0] = 1.0
        return B * s[:, None]

    def fiber(self, b):
        v = np.asarray(self.base.point(b))
        return [self.total.point(v), self.total.point(-v)]

    def reference_path(self, p, x0):
        p, x0 = np.asarray(p), np.asarray(x0)
        if np.dot(p, x0) > 0:
            return Constant(self.total, self.total.point(x0))
        return arc(self.total, p, _any_orthogonal(x0), math.pi)


@dataclass(frozen=True)
class CircleCover(Covering):
    """Degree-k self-cover of the unit circle, theta -> k theta."""

    k: int

    @property
    def total(self):
        return Circle()

    @property
    def base(self):
        return Circle()

    step_bound = math.pi / 2

    @property
    def lift_lipschitz(self):
        return 1.0 / self.k

    def project(self, P):
        return np.mod(self.k * P, TWO_PI)

    def local_lift(self, B, anchors):
        wrap = (B - self.k * anchors + math.pi) % TWO_PI - math.pi
        return np.mod(anchors + wrap / self.k, TWO_PI)

    def fiber(self, b):
        return [self.total.point([(b[0] + TWO_PI * j) / self.k]) for j in range(self.k)]

    def reference_path(self, p, x0):
        j = round(((p[0] - x0[0]) % TWO_PI) * self.k / TWO_PI) % self.k
        return linear_flow(self.total, p, [-TWO_PI * j / self.k])


@dataclass(frozen=True)
class IdentityCover(Covering):
    space: Space

    @property
    def total(self):
        return self.space

    @property
    def base(self):
        return self.space

    step_bound = math.inf
    trivial = True

    def project(self, P):
        return P

    def local_lift(self, B, anchors):
        return B

    def fiber(self, b):
        return [self.space.point(b)]

    def reference_path(self, p, x0):
        return Constant(self.space, self.space.point(x0))


@dataclass(frozen=True)
class Lifted(Path):
    """Lift of a base path starting at ``start``, tracked on a grid of step 1/LIFT_STEPS."""

    cover: Covering
    inner: Path
    start: tuple

    @property
    def space(self):
        return self.cover.total

    @property
    def lipschitz(self):
        return self.inner.lipschitz * self.cover.lift_lipschitz

    @cached_property
    def _grid(self) -> np.ndarray:
        ts = np.linspace(0.0, 1.0, LIFT_STEPS + 1)
        B = self.inner.trace(ts)
        steps = self.cover.base.distances(B[:-1], B[1:])
        if steps.max(initial=0.0) >= self.cover.step_bound:
            raise LiftStepTooCoarse(f"base step {steps.max():.3g} >= {self.cover.step_bound:.3g}")
        start = np.asarray(self.start, dtype=float)
        gap = self.cover.base.distance(self.cover.project(start[None, :])[0], B[0])
        if gap > 1e-9:
            raise ValueError("lift start is not over the path's start")
        out = np.empty_like(B)
        prev = start
        for i, b in enumerate(B):
            prev = self.cover.local_lift(b[None, :], prev[None, :])[0]
            out[i] = prev
        return out

    def trace(self, ts):
        ts = np.asarray(ts, dtype=float)
        idx = np.clip(np.rint(ts * LIFT_STEPS).astype(int), 0, LIFT_STEPS)
        return self.cover.local_lift(self.inner.trace(ts), self._grid[idx])

    def to_json(self):
        return {"kind": "lift", "cover": type(self.cover).__name__, "start": list(self.start),
                "inner": self.inner.to_json()}


def covering_lift_contraction(H: Contraction, cover: Covering, x0=None) -> Contraction:
    """Lift each path of H(p(x)) from x, then return along the reference path to x0."""
    if H.space != cover.base:
        raise MismatchedSpace("contraction does not live on the cover's base")
    total = cover.total
    if x0 is None:
        x0 = cover.fiber(H.basepoint)[0]
    x0 = total.point(x0)

    def rule(x):
        b = cover.base.point(cover.project(np.asarray(x)[None, :])[0])
        inner = H.rule(b)
        pieces = []
        for p, w, lab in zip(inner.paths, inner.weights, inner.labels):
            if cover.trivial:
                pieces.append((p, w, lab))
                continue
            lift = Constant(total, x) if isinstance(p, Constant) else Lifted(cover, p, x)
            end = lift.target
            fib = min(cover.fiber(H.basepoint), key=lambda q: total.distance(q, end))
            pieces.append((concat(lift, cover.reference_path(fib, x0)), w, lab))
        return distributed(total, x, x0, pieces)

    return Contraction(f"lift[{H.name}]", total, x0, H.pieces, rule)


# ---------------------------------------------------------------- homotopy transfer

def homotopy_transfer_planner(s: Planner, f, g, hmt: Callable[[tuple], Path], name: str | None = None) -> Planner:
    """Planner on Y from one on X, maps f: X -> Y, g: Y -> X and paths hmt(y) from y to f(g(y))."""
    Y = f.target
    if s.space != f.source or g.source != Y or g.target != s.space:
        raise MismatchedSpace("maps do not fit the planner's space")

    def rule(y, y2):
        inner = s.rule(g(y), g(y2))
        h1, h2 = hmt(y), hmt(y2)
        pieces = [(concat(concat(h1, mapped_path(f, p)), reverse(h2)), w, lab)
                  for p, w, lab in zip(inner.paths, inner.weights, inner.labels)]
        return distributed(Y, y, y2, pieces)

    return Planner(name or f"transfer[{s.name}]", Y, s.pieces, rule)


# ---------------------------------------------------------------- wedges

def wedge_planner(p: Planner, q: Planner, wedge: Wedge | None = None) -> Planner:
    """Planner on a wedge from planners on the factors, routing through the wedge point.

    Continuity across the wedge point needs p(v, v) and q(v, v) to be Dirac
    constant and the factor planners to vary continuously there.
    """
    if wedge is None:
        wedge = Wedge(p.space, q.space, default_basepoint(p.space), default_basepoint(q.space))
    inc = (WedgeInclusion(wedge, 0), WedgeInclusion(wedge, 1))
    planners = (p, q)
    bases = (wedge.left_base, wedge.right_base)

    def rule(x, y):
        sx, px = wedge.side_of(x)
        sy, py = wedge.side_of(y)
        if sx == sy:
            d = planners[sx].rule(px, py)
            return distributed(wedge, x, y, [(mapped_path(inc[sx], a), w, lab)
                                             for a, w, lab in zip(d.paths, d.weights, d.labels)])
        first = planners[sx].rule(px, bases[sx])
        second = planners[sy].rule(bases[sy], py)
        pieces = []
        for a, wa, la in zip(first.paths, first.weights, first.labels):
            for b, wb, lb in zip(second.paths, second.weights, second.labels):
                pieces.append((concat(mapped_path(inc[sx], a), mapped_path(inc[sy], b)), wa * wb, f"{la}|{lb}"))
        return distributed(wedge, x, y, pieces)

    return Planner(f"{p.name}v{q.name}", wedge, p.pieces * q.pieces, rule)


def wedge_to_product_contraction(s: Planner) -> Contraction:
    """Contraction of X x Y to (v, v): pair r_X(phi) with r_Y(reverse phi) for phi in s(x, y)."""
    wedge = s.space
    if not isinstance(wedge, Wedge):
        raise MismatchedSpace("planner must live on a wedge")
    space = Product((wedge.left, wedge.right))
    rx, ry = WedgeRetraction(wedge, 0), WedgeRetraction(wedge, 1)
    base = space.join((wedge.left_base, wedge.right_base))

    def rule(xy):
        x, y = space.split(xy)
        d = s.rule(wedge.include(0, x), wedge.include(1, y))
        pieces = [(product_path(space, (mapped_path(rx, p), mapped_path(ry, reverse(p)))), w, lab)
                  for p, w, lab in zip(d.paths, d.weights, d.labels)]
        return distributed(space, xy, base, pieces)

    return Contraction(f"wedge_to_product[{s.name}]", space, base, s.pieces, rule)


# ---------------------------------------------------------------- trees

def tree_geodesic_planner(graph: MetricGraph) -> Planner:
    """Dirac planner along the unique geodesic of a metric tree."""
    if not graph.is_tree():
        raise ValueError("geodesic planner needs a tree")
    G = nx.Graph()
    edge_of = {}
    for i, (a, b, L) in enumerate(graph.edges):
        G.add_edge(a, b, weight=L)
        edge_of[(a, b)] = (i, 0.0, 1.0)
        edge_of[(b, a)] = (i, 1.0, 0.0)
    D = graph.vertex_distances

    def route(x, y):
        ex, tx = int(round(x[0])), x[1]
        ey, ty = int(round(y[0])), y[1]
        if ex == ey:
            return [(ex, tx, ty)]
        (ax, bx, Lx), (ay, by, Ly) = graph.edges[ex], graph.edges[ey]
        best = None
        for vx, tvx, dx in ((ax, 0.0, tx * Lx), (bx, 1.0, (1 - tx) * Lx)):
            for vy, tvy, dy in ((ay, 0.0, ty * Ly), (by, 1.0, (1 - ty) * Ly)):
                total = dx + D[vx, vy] + dy
                if best is None or total < best[0] - 1e-15:
                    best = (total, vx, tvx, vy, tvy)
        _, vx, tvx, vy, tvy = best
        segs = [(ex, tx, tvx)]
        verts = nx.shortest_path(G, vx, vy, weight="weight")
        segs += [edge_of[(u, v)] for u, v in zip(verts, verts[1:])]
        segs.append((ey, tvy, ty))
        return segs

    def rule(x, y):
        segs = tuple((float(e), float(a), float(b)) for e, a, b in route(x, y) if a != b)
        path = Constant(graph, x) if not segs else EdgeWalk(graph, tuple((int(e), a, b) for e, a, b in segs))
        return distributed(graph, x, y, [(path, 1, "geodesic")])

    return Planner("tree_geodesic", graph, 1, rule)


# ---------------------------------------------------------------- registry

def shipped_planners() -> dict[str, Callable[[], Planner]]:
    """The planners held to the audit and continuity standards."""
    return {
        "rpn2": lambda: rpn_planner(2),
        "rpn3": lambda: rpn_planner(3),
        "circle": circle_planner,
        "odd_sphere3": lambda: odd_sphere_planner(3),
        "even_sphere2": lambda: even_sphere_planner(2),
        "torus2": lambda: group_translation_planner(torus_contraction(2)),
        "circle_x_circle": lambda: product_planner(circle_planner(), circle_planner()),
    }


def planner_by_name(name: str) -> Planner:
    shipped = shipped_planners()
    if name in shipped:
        return shipped[name]()
    m = re.fullmatch(r"(rpn|odd_sphere|even_sphere|sphere|torus)(\d+)", name)
    if m:
        kind, k = m.group(1), int(m.group(2))
        if kind == "rpn":
            return rpn_planner(k)
        if kind == "odd_sphere":
            return odd_sphere_planner(k)
        if kind == "even_sphere":
            return even_sphere_planner(k)
        if kind == "sphere":
            return sphere_planner(k)
        return group_translation_planner(torus_contraction(k))
    raise KeyError(f"unknown planner {name!r}")


def planner_for_space(space: Space) -> Planner:
    if isinstance(space, Circle):
        return circle_planner(space.radius)
    if isinstance(space, Sphere):
        return sphere_planner(space.n)
    if isinstance(space, RealProjective):
        return rpn_planner(space.n)
    if isinstance(space, Torus):
        return group_translation_planner(torus_contraction(space.m))
    if isinstance(space, MetricGraph):
        return tree_geodesic_planner(space)
    if isinstance(space, Product):
        out = planner_for_space(space.factors[0])
        for f in space.factors[1:]:
            out = product_planner(out, planner_for_space(f))
        if out.space != space:
            raise MismatchedSpace("nested products are not flattened; use two factors")
        return out
    if isinstance(space, Wedge):
        return wedge_planner(planner_for_space(space.left), planner_for_space(space.right), space)
    raise MismatchedSpace(f"no planner for {space.label}")
