"""Finitely-supported probability measures and the Levy-Prokhorov metric."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable

MAX_LP_SUPPORT = 15


class EmptySupport(ValueError):
    pass


class NonUnitMass(ValueError):
    pass


class NegativeWeight(ValueError):
    pass


class SupportTooLarge(ValueError):
    pass


class EpsilonTooLarge(ValueError):
    def __init__(self, eps, bound):
        super().__init__(f"epsilon {eps} must be below half the minimal atom separation ({bound})")
        self.eps = eps
        self.bound = bound


class MismatchedCarrier(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MetricOracle:
    """Distance on element ids. ``same`` decides id equality (default ``==``)."""

    distance: Callable[[Any, Any], Any]
    diameter_bound: float | None = None
    same: Callable[[Any, Any], bool] | None = None
    name: str = "metric"

    def is_same(self, a, b) -> bool:
        return self.same(a, b) if self.same is not None else a == b


def finite_metric(matrix) -> MetricOracle:
    """Metric on ids ``0..n-1`` given by a distance matrix."""
    rows = [list(r) for r in matrix]
    return MetricOracle(lambda a, b: rows[a][b], name=f"finite[{len(rows)}]")


@dataclass(frozen=True)
class FiniteSupportMeasure:
    atoms: tuple[tuple[Hashable, Fraction], ...]
    carrier: MetricOracle | None = None

    @property
    def support(self) -> list:
        return [a for a, _ in self.atoms]

    @property
    def weights(self) -> list[Fraction]:
        return [w for _, w in self.atoms]

    @property
    def mass(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def weight(self, element) -> Fraction:
        for a, w in self.atoms:
            if self._same(a, element):
                return w
        return Fraction(0)

    def _same(self, a, b) -> bool:
        return self.carrier.is_same(a, b) if self.carrier is not None else a == b

    def __len__(self) -> int:
        return len(self.atoms)

    def is_dirac(self) -> bool:
        return len(self.atoms) == 1

    def equals(self, other: "FiniteSupportMeasure") -> bool:
        """Same atoms with the same weights, up to carrier id-equality."""
        if len(self) != len(other):
            return False
        return all(other.weight(a) == w for a, w in self.atoms)

    def to_json(self, id_of: Callable[[Any], Any] = str) -> dict:
        return {"atoms": [{"id": id_of(a), "w": str(w)} for a, w in self.atoms]}


def _merge(pairs: Iterable[tuple[Any, Fraction]], carrier: MetricOracle | None) -> list[list]:
    merged: list[list] = []
    for a, w in pairs:
        for entry in merged:
            same = carrier.is_same(entry[0], a) if carrier is not None else entry[0] == a
            if same:
                entry[1] += w
                break
        else:
            merged.append([a, w])
    return merged


def make_measure(pairs: Iterable[tuple[Any, Any]], carrier: MetricOracle | None = None,
                 renormalize: bool = False) -> FiniteSupportMeasure:
    pairs = [(a, Fraction(w)) for a, w in pairs]
    if any(w < 0 for _, w in pairs):
        raise NegativeWeight("weights must be non-negative")
    pairs = [(a, w) for a, w in pairs if w > 0]
    if not pairs:
        raise EmptySupport("measure has no positive weight")
    merged = _merge(pairs, carrier)
    total = sum((w for _, w in merged), Fraction(0))
    if total != 1:
        if not renormalize:
            raise NonUnitMass(f"weights sum to {total}, not 1")
        merged = [[a, w / total] for a, w in merged]
    return FiniteSupportMeasure(tuple((a, w) for a, w in merged), carrier)


def dirac(element, carrier: MetricOracle | None = None) -> FiniteSupportMeasure:
    return FiniteSupportMeasure(((element, Fraction(1)),), carrier)


def pushforward(f: Callable[[Any], Any], mu: FiniteSupportMeasure,
                carrier: MetricOracle | None = None) -> FiniteSupportMeasure:
    """Image measure; atoms landing on the same id merge. ``carrier`` is the target metric."""
    merged = _merge(((f(a), w) for a, w in mu.atoms), carrier)
    return FiniteSupportMeasure(tuple((a, w) for a, w in merged), carrier)


def mix(t, mu: FiniteSupportMeasure, nu: FiniteSupportMeasure) -> FiniteSupportMeasure:
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError("mixing parameter must lie in [0, 1]")
    _shared_carrier(mu, nu)
    pairs = [(a, t * w) for a, w in mu.atoms] + [(a, (1 - t) * w) for a, w in nu.atoms]
    return make_measure(pairs, mu.carrier)


def _shared_carrier(mu, nu) -> MetricOracle:
    if mu.carrier is not nu.carrier:
        raise MismatchedCarrier("measures live on different carriers")
    if mu.carrier is None:
        raise MismatchedCarrier("measures need a metric carrier")
    return mu.carrier


def _distance_table(mu, nu, dist) -> list[list]:
    return [[dist(x, y) for y in nu.support] for x in mu.support]


def lp_semidistance_table(mu_w, nu_w, table) -> Any:
    """inf{eps : mu(C) <= nu(C^eps) + eps for all C in supp mu} from a distance table.

    For each subset C the threshold is found by walking the sorted distances
    from C to the atoms of nu; the semidistance is the largest threshold.
    """
    n = len(mu_w)
    if n > MAX_LP_SUPPORT:
        raise SupportTooLarge(f"support {n} exceeds {MAX_LP_SUPPORT}")
    m = len(nu_w)
    best = 0
    mins: list[list] = [None] * (1 << n)  # type: ignore[list-item]
    mass = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask & (mask - 1)
        row = table[low]
        if rest:
            prev = mins[rest]
            mins[mask] = [row[j] if row[j] < prev[j] else prev[j] for j in range(m)]
        else:
            mins[mask] = list(row)
        mass[mask] = mass[rest] + mu_w[low]
        c_mass = mass[mask]
        order = sorted(range(m), key=mins[mask].__getitem__)
        covered = 0
        left = 0
        eps_c = None
        for j in order:
            s = mins[mask][j]
            cand = max(c_mass - covered, left)
            if cand <= s:
                eps_c = cand
                break
            covered += nu_w[j]
            left = s
        if eps_c is None:
            eps_c = max(c_mass - covered, left)
        if eps_c > best:
            best = eps_c
    return best


def lp_semidistance(mu: FiniteSupportMeasure, nu: FiniteSupportMeasure):
    """Left Levy-Prokhorov semidistance rho^l(mu, nu)."""
    carrier = _shared_carrier(mu, nu)
    if len(mu) > MAX_LP_SUPPORT:
        raise SupportTooLarge(f"support {len(mu)} exceeds {MAX_LP_SUPPORT}")
    return lp_semidistance_table(mu.weights, nu.weights, _distance_table(mu, nu, carrier.distance))


def lp_distance(mu: FiniteSupportMeasure, nu: FiniteSupportMeasure):
    carrier = _shared_carrier(mu, nu)
    if max(len(mu), len(nu)) > MAX_LP_SUPPORT:
        raise SupportTooLarge(f"support exceeds {MAX_LP_SUPPORT}")
    table = _distance_table(mu, nu, carrier.distance)
    left = lp_semidistance_table(mu.weights, nu.weights, table)
    right = lp_semidistance_table(nu.weights, mu.weights, [list(c) for c in zip(*table)])
    return max(left, right)


def lp_distance_bounds(mu: FiniteSupportMeasure, nu: FiniteSupportMeasure,
                       bounds: Callable[[Any, Any], tuple[float, float]]) -> tuple[float, float]:
    """Certified [lo, hi] for the LP distance when atom distances are only known in intervals.

    The LP distance is non-decreasing in every atom distance, so evaluating
    it at the lower and upper distance bounds brackets the true value.
    """
    if max(len(mu), len(nu)) > MAX_LP_SUPPORT:
        raise SupportTooLarge(f"support exceeds {MAX_LP_SUPPORT}")
    iv = [[bounds(x, y) for y in nu.support] for x in mu.support]
    out = []
    for k in (0, 1):
        table = [[b[k] for b in row] for row in iv]
        left = lp_semidistance_table(mu.weights, nu.weights, table)
        right = lp_semidistance_table(nu.weights, mu.weights, [list(c) for c in zip(*table)])
        out.append(max(left, right))
    return out[0], out[1]


def lp_feasible(mu: FiniteSupportMeasure, nu: FiniteSupportMeasure, eps) -> bool:
    """Whether mu(C) <= nu(C^eps) + eps for every C in supp(mu) (open eps-neighborhoods)."""
    carrier = _shared_carrier(mu, nu)
    xs, ys = mu.support, nu.support
    table = _distance_table(mu, nu, carrier.distance)
    for mask in range(1, 1 << len(xs)):
        members = [i for i in range(len(xs)) if mask >> i & 1]
        c_mass = sum((mu.weights[i] for i in members), Fraction(0))
        near = sum((nu.weights[j] for j in range(len(ys)) if min(table[i][j] for i in members) < eps),
                   Fraction(0))
        if c_mass > near + eps:
            return False
    return True


def min_separation(mu: FiniteSupportMeasure):
    carrier = mu.carrier
    xs = mu.support
    seps = [carrier.distance(a, b) for i, a in enumerate(xs) for b in xs[i + 1:]]
    return min(seps) if seps else float("inf")


def in_basis_neighborhood(nu: FiniteSupportMeasure, mu: FiniteSupportMeasure, eps) -> bool:
    """Membership of nu in the basic open set U(mu, eps).

    Requires eps < delta / 2 where delta is the minimal separation of supp(mu).
    """
    carrier = _shared_carrier(mu, nu)
    bound = min_separation(mu)
    if eps >= bound / 2:
        raise EpsilonTooLarge(eps, bound / 2)
    if isinstance(eps, int):
        eps = Fraction(eps)
    n = len(mu)
    for z, lam in mu.atoms:
        near = sum((w for x, w in nu.atoms if carrier.distance(z, x) < eps), Fraction(0))
        if not lam < near + eps / n:
            return False
    return True


def measure_to_json_text(mu: FiniteSupportMeasure) -> str:
    return json.dumps(mu.to_json(), sort_keys=True)


def measure_from_json(data, carrier: MetricOracle | None = None) -> FiniteSupportMeasure:
    """Parse ``{"atoms": [{"id": ..., "w": "p/q"}, ...]}``."""
    if isinstance(data, str):
        data = json.loads(data)
    return make_measure(((a["id"], Fraction(a["w"])) for a in data["atoms"]), carrier)
