"""Batch audits of planners and contractions, continuity profiles, metric axiom checks."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .measure import (FiniteSupportMeasure, MetricOracle, dirac, finite_metric, lp_distance,
                      lp_distance_bounds, make_measure)
from .paths import ENDPOINT_TOL, Constant, path_bounds, DistributedPath, distributed, linear_flow
from .planners import Contraction, Planner
from .spaces import TWO_PI, Circle, Space

DEFAULT_SCALES = (0.2, 0.1, 0.05, 0.025)
CONTINUITY_THRESHOLD = 0.05
PROFILE_SAMPLES = 2048


def _halton(dim: int, n: int, seed: int) -> np.ndarray:
    return qmc.Halton(d=dim, scramble=True, seed=seed).random(n)


def _pt(p) -> list:
    return [float(v) for v in p]


@dataclass
class AuditReport:
    name: str
    samples: int
    seed: int
    pieces: int
    max_endpoint_error: float = 0.0
    mass_defect: Fraction = Fraction(0)
    max_support: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self, max_violations: int | None = None) -> dict:
        v = self.violations if max_violations is None else self.violations[:max_violations]
        return {
            "name": self.name, "samples": self.samples, "seed": self.seed, "pieces": self.pieces,
            "max_endpoint_error": self.max_endpoint_error, "mass_defect": str(self.mass_defect),
            "max_support": self.max_support, "violation_count": len(self.violations),
            "violations": [{"input": [_pt(p) for p in inp], "reason": r} for inp, r in v],
            "ok": self.ok,
        }


def _check(report: AuditReport, d: DistributedPath, inputs, source, target, pieces, domains, tol):
    space = d.space
    reasons = []
    if len(d) > pieces:
        reasons.append(f"support {len(d)} > {pieces}")
    mass = d.measure.mass
    report.mass_defect = max(report.mass_defect, abs(mass - 1))
    if mass != 1:
        reasons.append(f"mass {mass}")
    if any(w <= 0 for w in d.weights):
        reasons.append("non-positive weight")
    err = 0.0
    for p in d.paths:
        err = max(err, space.distance(p.source, source), space.distance(p.target, target))
    err = max(err, space.distance(d.source, source), space.distance(d.target, target))
    report.max_endpoint_error = max(report.max_endpoint_error, err)
    if err > tol:
        reasons.append(f"endpoint error {err:.3g}")
    for lab in d.labels:
        pred = domains.get(lab)
        if pred is not None and not pred(np.asarray(source), np.asarray(target)):
            reasons.append(f"piece {lab} used outside its domain")
    report.max_support = max(report.max_support, len(d))
    for r in reasons:
        report.violations.append((inputs, r))


def audit_planner(s: Planner, samples: int = 10_000, seed: int = 0, tol: float = ENDPOINT_TOL,
                  diagonal: bool = False) -> AuditReport:
    """Endpoint, mass, support and domain checks on low-discrepancy pairs.

    With ``diagonal`` the planner must also return a Dirac constant path on (x, x).
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sp = s.space
    k = sp.n_params
    U = _halton(2 * k, samples, seed)
    report = AuditReport(s.name, samples, seed, s.pieces)
    for u in U:
        x, y = sp.from_unit(u[:k]), sp.from_unit(u[k:])
        try:
            d = s.rule(x, y)
        except Exception as exc:  # a crashing rule is a violation, not an abort
            report.violations.append(((x, y), f"rule raised {type(exc).__name__}: {exc}"))
            continue
        _check(report, d, (x, y), x, y, s.pieces, s.domains, tol)
        if diagonal:
            dd = s.rule(x, x)
            if not dd.is_dirac_constant():
                report.violations.append(((x, x), "diagonal output is not a Dirac constant path"))
    return report


def audit_contraction(H: Contraction, samples: int = 10_000, seed: int = 0,
                      tol: float = ENDPOINT_TOL) -> AuditReport:
    sp = H.space
    U = _halton(sp.n_params, samples, seed)
    report = AuditReport(H.name, samples, seed, H.pieces)
    for u in U:
        x = sp.from_unit(u)
        try:
            d = H.rule(x)
        except Exception as exc:
            report.violations.append(((x,), f"rule raised {type(exc).__name__}: {exc}"))
            continue
        _check(report, d, (x,), x, H.basepoint, H.pieces, H.domains, tol)
    d = H.rule(H.basepoint)
    if not d.is_dirac_constant():
        report.violations.append(((H.basepoint,), "basepoint output is not a Dirac constant path"))
    return report


@dataclass
class ContinuityProfile:
    name: str
    scales: list[float]
    moduli: list[float]
    samples: list[int]
    seed: int
    threshold: float = CONTINUITY_THRESHOLD
    worst: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.moduli, self.moduli[1:]))

    @property
    def ok(self) -> bool:
        return self.monotone and self.moduli[-1] < self.threshold

    @property
    def flagged(self) -> bool:
        return not self.ok

    def to_json(self) -> dict:
        return {"name": self.name, "scales": self.scales, "moduli": [float(m) for m in self.moduli],
                "samples": self.samples, "seed": self.seed, "threshold": self.threshold,
                "monotone": self.monotone, "ok": self.ok,
                "worst": [[_pt(p) for p in w] for w in self.worst]}


def continuity_profile(s: Planner | Contraction, scales: Sequence[float] = DEFAULT_SCALES,
                       pairs_per_scale: int = 400, seed: int = 0,
                       threshold: float = CONTINUITY_THRESHOLD,
                       samples: int = PROFILE_SAMPLES) -> ContinuityProfile:
    """Max LP distance between outputs at inputs moved by at most delta, per scale.

    Path distances use the certified upper end of the sup-distance bracket at
    ``samples`` points, so the Lipschitz slack shrinks like 1/samples.

    The same base inputs, directions and radius fractions are reused at every
    scale, so the profile compares like with like as delta shrinks.
    """
    scales = [float(d) for d in scales]
    if any(b >= a for a, b in zip(scales, scales[1:])):
        raise ValueError("scales must be strictly decreasing")
    sp = s.space
    k = sp.n_params
    n_in = 1 if isinstance(s, Contraction) else 2
    base = _halton(n_in * k, pairs_per_scale, seed)
    moves = _halton(n_in * (k + 1), pairs_per_scale, seed + 1)
    evaluate = (lambda pts: s.rule(*pts))
    bounds = path_bounds(samples)
    inputs = [tuple(sp.from_unit(u[i * k:(i + 1) * k]) for i in range(n_in)) for u in base]
    outputs = [evaluate(pts) for pts in inputs]
    moduli, worst = [], []
    for delta in scales:
        best, arg = 0.0, None
        for pts, out, mv in zip(inputs, outputs, moves):
            moved = []
            for i, p in enumerate(pts):
                m = mv[i * (k + 1):(i + 1) * (k + 1)]
                q = sp.perturb(p, float(m[0]) * delta, m[1:])
                assert sp.distance(p, q) <= delta + 1e-12
                moved.append(q)
            dist = float(lp_distance_bounds(out.measure, evaluate(moved).measure, bounds)[1])
            if dist > best:
                best, arg = dist, (*pts, *moved)
        moduli.append(best)
        worst.append(arg or ())
    return ContinuityProfile(s.name, scales, moduli, [pairs_per_scale] * len(scales), seed, threshold, worst)


# ---------------------------------------------------------------- negative-control fixtures

def swapped_endpoint_planner(s: Planner) -> Planner:
    """Returns s(y, x) while claiming to go from x to y."""

    def rule(x, y):
        d = s.rule(y, x)
        return DistributedPath(d.measure, x, y, d.labels)

    return Planner(f"swapped[{s.name}]", s.space, s.pieces, rule)


def circle_geodesic_planner() -> Planner:
    """Shortest arc only; jumps across the antipodal branch cut."""
    space = Circle()

    def rule(x, y):
        d = (y[0] - x[0]) % TWO_PI
        if d > math.pi:
            d -= TWO_PI
        return distributed(space, x, y, [(linear_flow(space, x, [d]), 1, "geodesic")])

    return Planner("circle_geodesic", space, 1, rule)


def constant_planner(space: Space, point) -> Planner:
    """Ignores its input; continuous but not a section."""
    p = space.point(point)
    return Planner("constant", space, 1, lambda x, y: distributed(space, p, p, [(Constant(space, p), 1, "c")]))


def triangle_violating_oracle() -> tuple[MetricOracle, list[int]]:
    """d(0,2) = 3 > d(0,1) + d(1,2) = 2."""
    m = [[0, 1, 3], [1, 0, 1], [3, 1, 0]]
    return finite_metric(m), [0, 1, 2]


# ---------------------------------------------------------------- metric axioms

@dataclass
class AxiomReport:
    trials: int
    seed: int
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"trials": self.trials, "seed": self.seed, "checks": self.checks,
                "violations": [str(v) for v in self.violations[:100]],
                "violation_count": len(self.violations), "ok": self.ok}


def random_rational_metric(rng: random.Random, n: int, max_num: int = 12) -> list[list[Fraction]]:
    """Shortest-path closure of random positive rational edge weights."""
    d = [[Fraction(0) if i == j else None for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            w = Fraction(rng.randint(1, max_num), rng.randint(1, 6))
            d[i][j] = d[j][i] = w
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def random_measure(rng: random.Random, ids: Sequence, carrier: MetricOracle, max_support: int) -> FiniteSupportMeasure:
    k = rng.randint(1, min(max_support, len(ids)))
    chosen = rng.sample(list(ids), k)
    raw = [rng.randint(1, 9) for _ in chosen]
    tot = sum(raw)
    return make_measure([(c, Fraction(r, tot)) for c, r in zip(chosen, raw)], carrier)


def _oracle_axioms(report: AxiomReport, oracle: MetricOracle, points: Sequence) -> None:
    d = oracle.distance
    for a in points:
        report.checks += 1
        if d(a, a) != 0:
            report.violations.append(("identity", a))
    for a, b in itertools.combinations(points, 2):
        report.checks += 1
        if d(a, b) != d(b, a):
            report.violations.append(("symmetry", a, b))
        if d(a, b) < 0:
            report.violations.append(("negative", a, b))
    for a, b, c in itertools.permutations(points, 3):
        report.checks += 1
        if d(a, c) > d(a, b) + d(b, c):
            report.violations.append(("triangle", a, b, c))


def _lp_axioms(report: AxiomReport, mus: Sequence[FiniteSupportMeasure], carrier: MetricOracle, ids) -> None:
    dist = {}
    for i, j in itertools.product(range(len(mus)), repeat=2):
        dist[i, j] = lp_distance(mus[i], mus[j])
    for i in range(len(mus)):
        report.checks += 1
        if dist[i, i] != 0:
            report.violations.append(("lp identity", i))
    for i, j in itertools.combinations(range(len(mus)), 2):
        report.checks += 2
        if dist[i, j] != dist[j, i]:
            report.violations.append(("lp symmetry", dist[i, j], dist[j, i]))
        if (dist[i, j] == 0) != mus[i].equals(mus[j]):
            report.violations.append(("lp indiscernibles", i, j))
    for i, j, k in itertools.permutations(range(len(mus)), 3):
        report.checks += 1
        if dist[i, k] > dist[i, j] + dist[j, k]:
            report.violations.append(("lp triangle", dist[i, k], dist[i, j], dist[j, k]))
    for a, b in itertools.combinations(ids, 2):
        report.checks += 1
        got = lp_distance(dirac(a, carrier), dirac(b, carrier))
        if got != min(carrier.distance(a, b), 1):
            report.violations.append(("dirac", a, b, got))


def metric_axiom_suite(oracle: MetricOracle | None = None, points: Sequence | None = None,
                       trials: int = 1000, seed: int = 0, n_points: int = 4, max_support: int = 4,
                       measures_per_trial: int = 3) -> AxiomReport:
    """Exact axiom checks.

    Without an oracle each trial draws a random rational metric on ``n_points``
    points. Every trial checks the base metric, then LP identity, symmetry and
    triangle inequality on random measures, and the Dirac truncation rule.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    report = AxiomReport(trials, seed)
    for _ in range(trials):
        if oracle is None:
            ids = list(range(n_points))
            carrier = finite_metric(random_rational_metric(rng, n_points))
        else:
            ids, carrier = list(points), oracle
        _oracle_axioms(report, carrier, ids)
        mus = [random_measure(rng, ids, carrier, max_support) for _ in range(measures_per_trial)]
        mus.append(mus[0])
        _lp_axioms(report, mus, carrier, ids)
    return report
