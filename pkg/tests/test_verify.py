import json

import pytest

from distmotion.planners import circle_planner, rpn_planner, torus_contraction
from distmotion.spaces import Circle
from distmotion.verify import (audit_contraction, audit_planner, circle_geodesic_planner, constant_planner,
                               continuity_profile, metric_axiom_suite, swapped_endpoint_planner,
                               triangle_violating_oracle)


def test_swapped_planner_flagged():
    rep = audit_planner(swapped_endpoint_planner(circle_planner()), samples=500)
    assert not rep.ok and rep.max_endpoint_error > 1e-3
    assert all("endpoint" in r for _, r in rep.violations)


def test_constant_planner_not_a_section():
    rep = audit_planner(constant_planner(Circle(), (0.0,)), samples=200)
    assert not rep.ok


def test_geodesic_planner_passes_audit_but_jumps():
    s = circle_geodesic_planner()
    assert audit_planner(s, samples=500).ok
    prof = continuity_profile(s)
    assert prof.flagged and min(prof.moduli) > 0.5


def test_constant_planner_profile_is_zero():
    prof = continuity_profile(constant_planner(Circle(), (0.0,)), pairs_per_scale=50)
    assert prof.moduli == [0.0] * 4 and prof.ok


def test_circle_profile_decreases():
    prof = continuity_profile(circle_planner(), pairs_per_scale=100)
    assert prof.monotone and prof.ok


def test_profile_scales_must_decrease():
    with pytest.raises(ValueError):
        continuity_profile(circle_planner(), scales=(0.1, 0.2))


def test_contraction_profile_runs():
    prof = continuity_profile(torus_contraction(1), pairs_per_scale=50)
    assert len(prof.moduli) == 4 and prof.monotone


def test_audit_is_deterministic():
    a = audit_planner(rpn_planner(2), samples=300, seed=4).to_json()
    b = audit_planner(rpn_planner(2), samples=300, seed=4).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_audit_reports_support_and_mass():
    rep = audit_planner(rpn_planner(2), samples=500)
    assert rep.ok and rep.mass_defect == 0 and 1 <= rep.max_support <= rep.pieces


def test_contraction_audit():
    rep = audit_contraction(torus_contraction(2), samples=500)
    assert rep.ok and rep.max_support <= 4


def test_triangle_violating_oracle_flagged():
    oracle, pts = triangle_violating_oracle()
    rep = metric_axiom_suite(oracle, pts, trials=5)
    assert not rep.ok


def test_axiom_suite_clean():
    rep = metric_axiom_suite(trials=100, seed=1)
    assert rep.ok and rep.checks > 0


def test_axiom_suite_needs_trials():
    with pytest.raises(ValueError):
        metric_axiom_suite(trials=0)
