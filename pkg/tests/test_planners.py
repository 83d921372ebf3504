import math
from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np
import pytest

from distmotion.measure import lp_distance, make_measure
from distmotion.paths import Constant, EndpointMismatch, FunctionMap, eval_path, flatten, geodesic
from distmotion.planners import (INNER_RAMP, CircleCover, DoubleCover, IdentityCover, LiftStepTooCoarse, Lifted,
                                 SpaceNotGroup, circle_contraction, circle_planner, contraction_from_planner,
                                 covering_lift_contraction, even_sphere_planner, group_translation_planner,
                                 homotopy_transfer_planner, odd_sphere_planner, planner_by_name, product_planner,
                                 rpn_planner, shipped_planners, torus_contraction, tree_geodesic_planner,
                                 wedge_planner, wedge_to_product_contraction)
from distmotion.spaces import Circle, MetricGraph, Sphere, Torus, Wedge
from distmotion.verify import audit_contraction, audit_planner

TREE = MetricGraph(5, ((0, 1, 1.0), (1, 2, 2.0), (1, 3, 0.5), (3, 4, 1.5)))


def by_label(d):
    return dict(zip(d.labels, d.weights))


def flat_lp(d1, d2, space, ts=np.linspace(0, 1, 11)):
    """Largest LP distance between the flattened paths, re-homed on one carrier."""
    out = 0.0
    for t in ts:
        a = make_measure(flatten(d1)(t).atoms, space.oracle)
        b = make_measure(flatten(d2)(t).atoms, space.oracle)
        out = max(out, float(lp_distance(a, b)))
    return out


# ---------------------------------------------------------------- projective space

def test_rpn_diagonal_is_dirac_constant():
    s = rpn_planner(2)
    assert s((0.0, 0.6, 0.8), (0.0, 0.6, 0.8)).is_dirac_constant()


def test_rpn_perpendicular_lines_split_evenly():
    d = rpn_planner(2)((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))
    assert sorted(d.weights) == [F(1, 2), F(1, 2)]


def test_rpn_sixty_degrees():
    # weight (pi - a)/pi on the rotation by a, a/pi on the rotation by pi - a
    a = math.pi / 3
    d = rpn_planner(3)((1.0, 0.0, 0.0, 0.0), (math.cos(a), math.sin(a), 0.0, 0.0))
    w = by_label(d)
    assert w == {"rot_small": F(2, 3), "rot_large": F(1, 3)}
    lips = {lab: p.lipschitz for lab, p in zip(d.labels, d.paths)}
    assert lips["rot_small"] == pytest.approx(a) and lips["rot_large"] == pytest.approx(math.pi - a)


def test_rpn_deterministic():
    s = rpn_planner(2)
    x, y = (0.6, 0.0, 0.8), (0.0, 0.28, 0.96)
    assert s(x, y) == s(x, y)


# ---------------------------------------------------------------- circle

def test_circle_zero_is_dirac():
    assert circle_planner()((1.0,), (1.0,)).is_dirac_constant()


def test_circle_half_turn_even_split():
    assert by_label(circle_planner()((0.0,), (math.pi,))) == {"ccw": F(1, 2), "cw": F(1, 2)}


def test_circle_ccw_weight_vanishes_near_full_turn():
    s = circle_planner()
    ws = [by_label(s((0.0,), (2 * math.pi - h,)))["ccw"] for h in (0.1, 0.01, 0.001)]
    assert ws == sorted(ws, reverse=True) and ws[-1] < 1e-3


# ---------------------------------------------------------------- spheres

def test_odd_sphere_diagonal():
    x = (0.5, 0.5, 0.5, 0.5)
    assert odd_sphere_planner(3)(x, x).is_dirac_constant()


def test_odd_sphere_antipode_single_piece_through_minus_x():
    x = np.array([0.5, 0.5, 0.5, 0.5])
    d = odd_sphere_planner(3)(tuple(x), tuple(-x))
    assert d.labels == ("via_antipode",) and d.weights == [1]
    mid = eval_path(d.paths[0], 0.5)
    assert Sphere(3).distance(mid, tuple(-x)) < 1e-12


def test_odd_sphere_inner_ramp_midpoint():
    # <x, y> = -5/8 is the midpoint of the inner-product ramp [1/2, 3/4]
    c = -5 / 8
    x, y = (1.0, 0.0, 0.0, 0.0), (c, math.sqrt(1 - c * c), 0.0, 0.0)
    d = odd_sphere_planner(3, INNER_RAMP)(x, y)
    assert by_label(d) == {"direct": F(1, 2), "via_antipode": F(1, 2)}


def test_even_sphere_diagonal():
    x = (0.0, 0.6, 0.8)
    assert even_sphere_planner(2)(x, x).is_dirac_constant()


def test_even_sphere_equator_antipodes_use_field_piece():
    x = np.array([0.0, 0.6, 0.8])
    d = even_sphere_planner(2)(tuple(x), tuple(-x))
    assert by_label(d) == {"field": 1}


def test_even_sphere_bad_pair_uses_pole_piece():
    d = even_sphere_planner(2)((1.0, 0.0, 0.0), (-1.0, 0.0, 0.0))
    assert by_label(d) == {"pole": 1}


def test_even_sphere_needs_even_dimension():
    with pytest.raises(ValueError):
        even_sphere_planner(3)
    with pytest.raises(ValueError):
        odd_sphere_planner(2)


# ---------------------------------------------------------------- groups, products, contractions

def test_torus_contraction_centre_splits_in_four():
    d = torus_contraction(2)((0.5, 0.5))
    assert sorted(d.weights) == [F(1, 4)] * 4


def test_torus_contraction_basepoint_dirac():
    H = torus_contraction(3)
    assert H(H.basepoint).is_dirac_constant()


def test_translation_planner_diagonal():
    s = group_translation_planner(torus_contraction(2))
    assert s((0.3, 0.7), (0.3, 0.7)).is_dirac_constant()


def test_translation_matches_circle_planner():
    s = group_translation_planner(circle_contraction())
    c = circle_planner()
    for x, y in [((0.3,), (2.0,)), ((5.0,), (1.0,)), ((1.0,), (1.0 + math.pi,))]:
        a, b = s(x, y), c(x, y)
        assert np.allclose(sorted(map(float, a.weights)), sorted(map(float, b.weights)), atol=1e-9)
        assert flat_lp(a, b, c.space) < 1e-9


def test_translation_equivariance():
    s = group_translation_planner(torus_contraction(2))
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y, c = rng.random(2), rng.random(2), rng.random(2)
        base = s(tuple(x), tuple(y))
        moved = s(tuple((x + c) % 1), tuple((y + c) % 1))
        assert np.allclose(sorted(map(float, base.weights)), sorted(map(float, moved.weights)), atol=1e-9)
        ts = np.linspace(0, 1, 9)
        for p in base.paths:
            shifted = (p.trace(ts) + c) % 1
            assert any(np.max(Torus(2).distances(shifted, q.trace(ts))) < 1e-9 for q in moved.paths)


def test_translation_needs_group():
    with pytest.raises(SpaceNotGroup):
        group_translation_planner(contraction_from_planner(rpn_planner(2), (0.0, 0.0, 1.0)))


def test_product_weights_multiply():
    s = product_planner(circle_planner(), circle_planner())
    d = s(s.space.join([(0.0,), (0.0,)]), s.space.join([(math.pi / 2,), (math.pi,)]))
    assert sorted(d.weights) == sorted([F(3, 8), F(1, 8), F(3, 8), F(1, 8)])
    assert len(d) <= s.pieces == 4


def test_product_of_dirac_planners_is_dirac():
    t = tree_geodesic_planner(TREE)
    s = product_planner(t, t)
    d = s(s.space.join([(0, 0.2), (2, 0.5)]), s.space.join([(3, 0.9), (1, 0.1)]))
    assert len(d) == 1


def test_contraction_from_rpn():
    H = contraction_from_planner(rpn_planner(2), (0.0, 0.0, 1.0))
    assert H.pieces == 2 and H(H.basepoint).is_dirac_constant()
    assert audit_contraction(H, samples=500).ok


# ---------------------------------------------------------------- coverings

def test_lift_of_projective_contraction_ends_at_basepoint():
    H = contraction_from_planner(rpn_planner(2), (0.0, 0.0, 1.0))
    G = covering_lift_contraction(H, DoubleCover(2))
    for x in [(0.0, 0.0, -1.0), (0.6, 0.0, -0.8), (0.0, 0.6, 0.8)]:
        d = G(x)
        assert all(np.array_equal(np.asarray(p.target), np.asarray(G.basepoint)) or
                   Sphere(2).distance(p.target, G.basepoint) < 1e-12 for p in d.paths)
    assert audit_contraction(G, samples=300).ok


def test_identity_cover_leaves_contraction_unchanged():
    H = circle_contraction()
    G = covering_lift_contraction(H, IdentityCover(Circle()))
    for x in [(0.5,), (3.0,), (6.0,)]:
        assert G(x) == H(x)


def test_degree_two_circle_cover():
    G = covering_lift_contraction(circle_contraction(), CircleCover(2))
    assert G.pieces == 2
    assert audit_contraction(G, samples=500).ok


@dataclass(frozen=True)
class _TightCover(DoubleCover):
    step_bound = 1e-6


def test_lift_step_guard():
    inner = geodesic(DoubleCover(2).base, (1.0, 0.0, 0.0), (0.0, 1.0, 0.0))
    with pytest.raises(LiftStepTooCoarse):
        Lifted(_TightCover(2), inner, (1.0, 0.0, 0.0)).trace([0.5])


# ---------------------------------------------------------------- homotopy transfer

def test_transfer_with_identity_maps_reproduces_planner():
    s = circle_planner()
    C = s.space
    ident = FunctionMap("id", C, C, lambda P: P, 1.0)
    t = homotopy_transfer_planner(s, ident, ident, lambda y: Constant(C, C.point(y)))
    for x, y in [((0.3,), (2.0,)), ((5.0,), (1.0,))]:
        a, b = t(x, y), s(x, y)
        assert a.weights == b.weights and t.pieces == s.pieces
        # the transferred path sits in the second quarter, between the two homotopy legs
        ts = np.linspace(0, 1, 9)
        for p, q in zip(a.paths, b.paths):
            assert np.max(C.distances(p.trace(0.25 + 0.25 * ts), q.trace(ts))) < 1e-9


def test_transfer_between_circle_radii_audits_clean():
    X, Y = Circle(2.0), Circle(1.0)
    f = FunctionMap("shrink", X, Y, lambda P: P, 0.5)
    g = FunctionMap("grow", Y, X, lambda P: P, 2.0)
    t = homotopy_transfer_planner(circle_planner(2.0), f, g, lambda y: Constant(Y, Y.point(y)))
    assert t.space == Y and t.pieces == 2
    assert audit_planner(t, samples=1000).ok


def test_transfer_rejects_bad_homotopy():
    C = Circle()
    ident = FunctionMap("id", C, C, lambda P: P, 1.0)
    t = homotopy_transfer_planner(circle_planner(), ident, ident, lambda y: Constant(C, (1.0,)))
    with pytest.raises(EndpointMismatch):
        t((0.3,), (2.0,))


# ---------------------------------------------------------------- wedges and trees

def test_wedge_planner_audit():
    s = wedge_planner(circle_planner(), circle_planner())
    assert audit_planner(s, samples=1000).ok


def test_wedge_to_product_constant_second_coordinate():
    t = tree_geodesic_planner(TREE)
    W = Wedge(TREE, TREE, (0, 0.0), (0, 0.0))
    H = wedge_to_product_contraction(wedge_planner(t, t, W))
    d = H(H.space.join([(2, 0.5), (0, 0.0)]))
    ts = np.linspace(0, 1, 17)
    (p,) = d.paths
    second = np.array([H.space.split(row)[1] for row in p.trace(ts)])
    assert np.ptp(second, axis=0).max() < 1e-12 or TREE.distances(second, second[:1].repeat(len(ts), 0)).max() < 1e-12


def test_wedge_to_product_audit():
    H = wedge_to_product_contraction(wedge_planner(circle_planner(), circle_planner()))
    rep = audit_contraction(H, samples=500)
    assert rep.ok and rep.mass_defect == 0


def test_tree_planner_audit():
    rep = audit_planner(tree_geodesic_planner(TREE), samples=2000)
    assert rep.ok and rep.max_support == 1


def test_tree_planner_rejects_cycles():
    with pytest.raises(ValueError):
        tree_geodesic_planner(MetricGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0))))


# ---------------------------------------------------------------- registry

def test_registry_names():
    for name, make in shipped_planners().items():
        assert make().pieces >= 2
    assert planner_by_name("rpn5").space.n == 5
    with pytest.raises(KeyError):
        planner_by_name("klein_bottle")
