"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import time

import pytest

from distmotion.cli import table
from distmotion.fixtures import fixture
from distmotion.homology import cohomology_ring, cup_length, zero_divisor_cuplength
from distmotion.linalg import GF2, QQ
from distmotion.planners import (circle_planner, even_sphere_planner, group_translation_planner, odd_sphere_planner,
                                 product_planner, rpn_planner, shipped_planners, torus_contraction)
from distmotion.symsquare import diagonal_check, dold_check, sp2_bound_check, symmetric_square
from distmotion.verify import audit_planner, circle_geodesic_planner, continuity_profile, metric_axiom_suite


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail, elapsed):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail} ({elapsed:.1f}s)")
        return ok
    return emit


def test_criterion_1_lp_metric_suite(report):
    t0 = time.perf_counter()
    rep = metric_axiom_suite(trials=1000, seed=0, n_points=4, max_support=4)
    dt = time.perf_counter() - t0
    ok = rep.ok and dt < 10
    report(1, ok, f"LP axioms, {rep.checks} exact checks, {len(rep.violations)} violations", dt)
    assert ok, rep.to_json()


def test_criterion_2_planner_audits(report):
    planners = [rpn_planner(2), rpn_planner(3), circle_planner(), odd_sphere_planner(3), even_sphere_planner(2),
                group_translation_planner(torus_contraction(2)), product_planner(circle_planner(), circle_planner())]
    t0 = time.perf_counter()
    bad = {}
    for s in planners:
        rep = audit_planner(s, samples=10_000, seed=0)
        if not rep.ok:
            bad[s.name] = rep.to_json(max_violations=3)
    dt = time.perf_counter() - t0
    ok = not bad and dt < 60
    report(2, ok, f"{len(planners)} planners x 10^4 samples, failing: {sorted(bad) or 'none'}", dt)
    assert ok, bad


def test_criterion_3_continuity_profiles(report):
    t0 = time.perf_counter()
    moduli, failing = {}, []
    for name, make in shipped_planners().items():
        prof = continuity_profile(make())
        moduli[name] = [round(m, 4) for m in prof.moduli]
        if not prof.ok:
            failing.append(name)
    neg = continuity_profile(circle_geodesic_planner())
    neg_ok = all(m > 0.5 for m in neg.moduli)
    dt = time.perf_counter() - t0
    ok = not failing and neg_ok
    report(3, ok, f"moduli at delta=0.025 must be < 0.05; failing: {failing or 'none'}; "
                  f"negative control {'flagged' if neg_ok else 'missed'} at every scale", dt)
    for name, m in moduli.items():
        print(name, m)
    assert ok, {"failing": {k: moduli[k] for k in failing}, "negative": neg.moduli}


def test_criterion_4_cohomological_table(report):
    expected = [
        ("Sigma2", QQ, cup_length, 2), ("T2", QQ, cup_length, 2), ("CP2", QQ, cup_length, 2),
        ("S2", QQ, cup_length, 1),
        ("S2", QQ, zero_divisor_cuplength, 2), ("S3", QQ, zero_divisor_cuplength, 1),
        ("Sigma2", QQ, zero_divisor_cuplength, 4), ("CP2", QQ, zero_divisor_cuplength, 4),
        ("figure8", QQ, zero_divisor_cuplength, 2), ("T2", QQ, zero_divisor_cuplength, 2),
        ("RP2", GF2, cup_length, 2),
    ]
    t0 = time.perf_counter()
    rings, wrong = {}, []
    for name, field, fn, value in expected:
        key = (name, field.name)
        if key not in rings:
            rings[key] = cohomology_ring(fixture(name), field)
        got = fn(rings[key])
        if got != value:
            wrong.append((name, field.name, fn.__name__, got, value))
    dt = time.perf_counter() - t0
    ok = not wrong and dt < 120
    report(4, ok, f"{len(expected)} exact invariants, mismatches: {wrong or 'none'}", dt)
    assert ok, wrong


def test_criterion_5_symmetric_square(report):
    t0 = time.perf_counter()
    problems = []
    squares = {name: symmetric_square(fixture(name)) for name in ("S1", "S2", "RP2")}
    if squares["S1"].betti(QQ)[:2] != [1, 1] or any(squares["S1"].betti(QQ)[2:]):
        problems.append(("betti S1", squares["S1"].betti(QQ)))
    if squares["S2"].betti(QQ)[:5] != [1, 0, 1, 0, 1] or any(squares["S2"].betti(QQ)[5:]):
        problems.append(("betti S2", squares["S2"].betti(QQ)))
    for name, S in squares.items():
        for field in (QQ, GF2):
            r = dold_check(S, field)
            if not (r["split_mono"] and r["chain_map"]):
                problems.append(("dold", name, field.name))
    for name in ("S1", "S2"):
        r = diagonal_check(squares[name], QQ)
        if not (r["surjective"] and r["chain_map"]):
            problems.append(("diagonal", name))
    for name in ("Sigma2", "T2"):
        if not sp2_bound_check(fixture(name), QQ)["certifies_dcat_ge_2"]:
            problems.append(("bound", name))
    dt = time.perf_counter() - t0
    ok = not problems and dt < 300
    report(5, ok, f"SP^2 betti, Dold, diagonal and bound checks; problems: {problems or 'none'}", dt)
    assert ok, problems


def test_criterion_6_reproduction_table(report):
    t0 = time.perf_counter()
    rows = {(r.space, r.quantity): r for r in table()}
    dt = time.perf_counter() - t0
    checks = [
        all(r.ok for r in rows.values()),
        rows[("RP2", "dTC")].reference_value == 1 and rows[("RP2", "dTC")].witness_pieces == 2,
        rows[("S3", "dTC")].reference_value == 1 and rows[("S3", "dTC")].witness_pieces == 2,
        rows[("S2", "dTC")].lower_bound == 2 and rows[("S2", "dTC")].witness_pieces == 3,
        rows[("T2", "dTC")].lower_bound == 2 and rows[("T2", "dTC")].witness_pieces == 4,
        rows[("Sigma2", "dTC")].lower_bound == 4 and rows[("Sigma2", "dTC")].witness == "none",
    ]
    ok = all(checks)
    report(6, ok, f"{len(rows)} rows, all invariants hold: {ok}", dt)
    assert ok, [r.to_json() for r in rows.values()]
