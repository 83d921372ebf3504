"""Simplicial cohomology rings over Q and Z/p, cup-length and zero-divisor cup-length."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .linalg import QQ, GF2, Coordinates, Field, SparseReducer, nullspace, sparse_kernel, sparse_rank


class MalformedInput(ValueError):
    pass


class NonSimplex(ValueError):
    pass


class SimplicialComplex:
    """Finite simplicial complex on vertices ``0..n-1``.

    Faces of each dimension are sorted vertex tuples, listed in lexicographic
    order; the integer order of vertices is the order used by cup products.
    """

    def __init__(self, n_vertices: int, maximal: Iterable[Sequence[int]]):
        maximal = [tuple(s) for s in maximal]
        for s in maximal:
            if not s:
                raise MalformedInput("empty simplex")
            if len(set(s)) != len(s):
                raise NonSimplex(f"repeated vertex in {list(s)}")
            if any((not isinstance(v, int)) or v < 0 or v >= n_vertices for v in s):
                raise MalformedInput(f"vertex out of range in {list(s)}")
        self.n_vertices = n_vertices
        closure: set[tuple[int, ...]] = {(v,) for v in range(n_vertices)}
        for s in maximal:
            s = tuple(sorted(s))
            for k in range(1, len(s) + 1):
                closure.update(itertools.combinations(s, k))
        top = max(len(f) for f in closure) - 1 if closure else -1
        self._faces = [sorted(f for f in closure if len(f) == d + 1) for d in range(top + 1)]
        self._index = [{f: i for i, f in enumerate(fs)} for fs in self._faces]
        self.maximal = sorted({tuple(sorted(s)) for s in maximal} | {
            f for f in closure if len(f) == 1 and not any(f[0] in s for s in maximal)
        })

    @property
    def dim(self) -> int:
        return len(self._faces) - 1

    def faces(self, d: int) -> list[tuple[int, ...]]:
        return self._faces[d] if 0 <= d <= self.dim else []

    def index(self, d: int) -> dict[tuple[int, ...], int]:
        return self._index[d] if 0 <= d <= self.dim else {}

    def f_vector(self) -> list[int]:
        return [len(fs) for fs in self._faces]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.f_vector()))

    def all_faces(self) -> list[tuple[int, ...]]:
        return [f for fs in self._faces for f in fs]

    def coboundary_rows(self, d: int) -> list[list[int]]:
        """Matrix of the coboundary C^d -> C^{d+1}, one row per (d+1)-face."""
        src = self.faces(d)
        rows = []
        for s in self.faces(d + 1):
            row = [0] * len(src)
            for i in range(len(s)):
                row[self._index[d][s[:i] + s[i + 1:]]] = (-1) ** i
            rows.append(row)
        return rows

    def relabeled(self, perm: Sequence[int]) -> "SimplicialComplex":
        return SimplicialComplex(self.n_vertices, [[perm[v] for v in s] for s in self.maximal])

    def reversed_order(self) -> "SimplicialComplex":
        n = self.n_vertices
        return self.relabeled([n - 1 - v for v in range(n)])

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices, "maximal": [list(s) for s in self.maximal]}

    def __repr__(self) -> str:
        return f"SimplicialComplex(vertices={self.n_vertices}, f={self.f_vector()})"


def load_complex(data) -> SimplicialComplex:
    """Build a complex from ``{"vertices": N, "maximal": [[...], ...]}`` (dict or JSON text)."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "maximal" not in data:
        raise MalformedInput('expected {"vertices": N, "maximal": [[...], ...]}')
    maximal = data["maximal"]
    if not isinstance(maximal, list) or not all(isinstance(s, list) for s in maximal):
        raise MalformedInput("maximal must be a list of vertex lists")
    n = data.get("vertices")
    if n is None:
        n = 1 + max((v for s in maximal for v in s), default=-1)
    if not isinstance(n, int) or n < 1:
        raise MalformedInput("vertices must be a positive integer")
    return SimplicialComplex(n, maximal)


def product_complex(K: SimplicialComplex, L: SimplicialComplex) -> SimplicialComplex:
    """Staircase triangulation of K x L; vertex (a, b) gets id a * |V(L)| + b."""
    m = L.n_vertices
    maximal = []
    for s in K.maximal:
        for t in L.maximal:
            p, q = len(s) - 1, len(t) - 1
            for ups in itertools.combinations(range(p + q), p):
                i = j = 0
                simplex = [s[0] * m + t[0]]
                for step in range(p + q):
                    if step in ups:
                        i += 1
                    else:
                        j += 1
                    simplex.append(s[i] * m + t[j])
                maximal.append(simplex)
    return SimplicialComplex(K.n_vertices * m, maximal)


def betti(K: SimplicialComplex, field: Field = QQ) -> list[int]:
    ranks = [sparse_rank(_coboundary_columns(K, d), field) for d in range(K.dim + 1)]
    return [len(K.faces(d)) - ranks[d] - (ranks[d - 1] if d else 0) for d in range(K.dim + 1)]


# ---------------------------------------------------------------------------
# graded rings


def _sparse(vec: Sequence) -> dict[int, object]:
    return {i: x for i, x in enumerate(vec) if x != 0}


@dataclass
class GradedRing:
    """Finite-dimensional graded-commutative algebra with structure constants.

    ``table[(i, j)]`` is the product of basis elements i and j as a sparse
    vector (dict basis-index -> coefficient). Missing entries are zero.
    """

    field: Field
    degrees: list[int]
    table: dict[tuple[int, int], dict[int, object]]
    labels: list[str] = dc_field(default_factory=list)
    unit: dict[int, object] | None = None

    def __post_init__(self):
        if not self.labels:
            self.labels = [f"e{i}" for i in range(len(self.degrees))]

    @property
    def dimension(self) -> int:
        return len(self.degrees)

    def positive_basis(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d > 0]

    def basis_vector(self, i: int) -> dict[int, object]:
        return {i: self.field.one}

    def mul(self, u: dict[int, object], v: dict[int, object]) -> dict[int, object]:
        f = self.field
        out: dict[int, object] = {}
        for i, a in u.items():
            for j, b in v.items():
                prod = self.table.get((i, j))
                if not prod:
                    continue
                ab = f.mul(a, b)
                for k, c in prod.items():
                    nv = f.add(out.get(k, f.zero), f.mul(ab, c))
                    if nv == 0:
                        out.pop(k, None)
                    else:
                        out[k] = nv
        return out

    def check_graded_commutative(self) -> bool:
        f = self.field
        n = self.dimension
        for i in range(n):
            for j in range(i, n):
                sign = -1 if (self.degrees[i] * self.degrees[j]) % 2 else 1
                ab = self.table.get((i, j), {})
                ba = self.table.get((j, i), {})
                keys = set(ab) | set(ba)
                if any(ba.get(k, f.zero) != f.mul(f(sign), ab.get(k, f.zero)) for k in keys):
                    return False
        return True

    def check_associative(self) -> bool:
        n = self.dimension
        top = max(self.degrees, default=0)
        for i in range(n):
            for j in range(n):
                if self.degrees[i] + self.degrees[j] > top:
                    continue
                ij = self.table.get((i, j), {})
                for k in range(n):
                    if self.degrees[i] + self.degrees[j] + self.degrees[k] > top:
                        continue
                    left = self.mul(ij, {k: self.field.one})
                    right = self.mul({i: self.field.one}, self.table.get((j, k), {}))
                    if left != right:
                        return False
        return True

    def check_degrees(self) -> bool:
        return all(self.degrees[k] == self.degrees[i] + self.degrees[j]
                   for (i, j), prod in self.table.items() for k in prod)

    def validate(self) -> None:
        if not self.check_degrees():
            raise ValueError("multiplication table is not degree-additive")
        if not self.check_graded_commutative():
            raise ValueError("multiplication table is not graded-commutative")
        if not self.check_associative():
            raise ValueError("multiplication table is not associative")


def _span_basis(vectors: Iterable[dict[int, object]], field: Field) -> list[dict[int, object]]:
    red = SparseReducer(field)
    out = []
    for v in vectors:
        if v and red.add(v):
            out.append(v)
    return out


def _iterated_span_length(R: GradedRing, generators: list[dict[int, object]]) -> int:
    """Largest k with span of k-fold products of ``generators`` non-zero."""
    current = _span_basis(generators, R.field)
    k = 0
    while current:
        k += 1
        current = _span_basis((R.mul(g, v) for g in generators for v in current), R.field)
    return k


def cup_length(R: GradedRing) -> int:
    return _iterated_span_length(R, [R.basis_vector(i) for i in R.positive_basis()])


@dataclass
class TensorSquareRing(GradedRing):
    """R (x) R with the sign-twisted product; basis index i*N + j is e_i (x) e_j."""

    base: GradedRing | None = None

    def delta_star(self, v: dict[int, object]) -> dict[int, object]:
        """Multiplication map a (x) b -> a b into the base ring."""
        R = self.base
        n = R.dimension
        out: dict[int, object] = {}
        for idx, c in v.items():
            prod = R.table.get(divmod(idx, n), {})
            for k, x in prod.items():
                nv = R.field.add(out.get(k, R.field.zero), R.field.mul(c, x))
                if nv == 0:
                    out.pop(k, None)
                else:
                    out[k] = nv
        return out

    def zero_divisors(self) -> list[dict[int, object]]:
        """Basis of ker(delta_star) in positive total degree, degree by degree."""
        R = self.base
        n = R.dimension
        out = []
        for d in sorted(set(self.degrees)):
            if d == 0:
                continue
            cols = [i for i, dd in enumerate(self.degrees) if dd == d]
            rows_idx = [k for k, dk in enumerate(R.degrees) if dk == d]
            if not rows_idx:
                out.extend({c: R.field.one} for c in cols)
                continue
            mat = [[R.table.get(divmod(c, n), {}).get(k, R.field.zero) for c in cols] for k in rows_idx]
            for vec in nullspace(mat, len(cols), R.field):
                out.append({cols[i]: x for i, x in enumerate(vec) if x != 0})
        return out


def tensor_square(R: GradedRing) -> TensorSquareRing:
    f = R.field
    n = R.dimension
    degrees = [R.degrees[i] + R.degrees[j] for i in range(n) for j in range(n)]
    table: dict[tuple[int, int], dict[int, object]] = {}
    for i, j, k, l in itertools.product(range(n), repeat=4):
        ik = R.table.get((i, k))
        jl = R.table.get((j, l))
        if not ik or not jl:
            continue
        sign = f(-1) if (R.degrees[j] * R.degrees[k]) % 2 else f.one
        prod = {}
        for a, x in ik.items():
            for b, y in jl.items():
                prod[a * n + b] = f.mul(sign, f.mul(x, y))
        table[(i * n + j, k * n + l)] = prod
    labels = [f"{a}(x){b}" for a in R.labels for b in R.labels]
    unit = None
    if R.unit is not None:
        unit = {}
        for a, x in R.unit.items():
            for b, y in R.unit.items():
                unit[a * n + b] = f.mul(x, y)
    return TensorSquareRing(f, degrees, table, labels, unit, base=R)


def zero_divisor_cuplength(R: GradedRing) -> int:
    T = tensor_square(R)
    return _iterated_span_length(T, T.zero_divisors())


def basic_zero_divisors(R: GradedRing) -> list[dict[int, object]]:
    """a (x) 1 - 1 (x) a for each positive-degree basis element a."""
    if R.unit is None:
        raise ValueError("ring has no recorded unit")
    f = R.field
    n = R.dimension
    out = []
    for a in R.positive_basis():
        v: dict[int, object] = {}
        for u, c in R.unit.items():
            v[a * n + u] = f.add(v.get(a * n + u, f.zero), c)
            v[u * n + a] = f.sub(v.get(u * n + a, f.zero), c)
        out.append({k: x for k, x in v.items() if x != 0})
    return out


def zero_divisor_cuplength_basic(R: GradedRing) -> int:
    """Longest non-zero product of basic zero-divisors, by exhaustive search."""
    T = tensor_square(R)
    gens = basic_zero_divisors(R)
    best = 0
    for k in itertools.count(1):
        found = False
        for combo in itertools.combinations_with_replacement(range(len(gens)), k):
            prod = gens[combo[0]]
            for c in combo[1:]:
                prod = T.mul(prod, gens[c])
                if not prod:
                    break
            if prod:
                found = True
                break
        if not found:
            return best
        best = k


# ---------------------------------------------------------------------------
# cohomology of a complex


@dataclass
class Cohomology:
    """Cocycle representatives and reduction data for H^*(K; F)."""

    complex: SimplicialComplex
    field: Field
    reps: list[list[list]]  # reps[d] = list of cocycle vectors on d-faces
    _coords: list[Coordinates | None]
    _nbound: list[int]

    def reduce(self, d: int, cocycle: Sequence) -> list:
        """Coordinates in the H^d basis of a d-cocycle."""
        if not self.reps[d]:
            return []
        return self._coords[d].coords(cocycle)[self._nbound[d]:]


def _coboundary_columns(K: SimplicialComplex, d: int) -> list[dict[int, int]]:
    """delta(e_s) for each d-face s, as sparse vectors over (d+1)-faces."""
    cols: list[dict[int, int]] = [{} for _ in K.faces(d)]
    idx = K.index(d)
    for j, t in enumerate(K.faces(d + 1)):
        for i in range(len(t)):
            cols[idx[t[:i] + t[i + 1:]]][j] = (-1) ** i
    return cols


def cohomology(K: SimplicialComplex, field: Field = QQ) -> Cohomology:
    reps, coords, nbound = [], [], []
    for d in range(K.dim + 1):
        n = len(K.faces(d))
        cocycles = sparse_kernel(_coboundary_columns(K, d), field)
        boundaries = _coboundary_columns(K, d - 1) if d else []
        red = SparseReducer(field)
        bbasis = [v for v in boundaries if red.add(v)]
        hreps = [v for v in cocycles if red.add(v)]
        reps.append([[v.get(i, field.zero) for i in range(n)] for v in hreps])
        nbound.append(len(bbasis))
        coords.append(Coordinates(bbasis + hreps, n, field) if hreps else None)
    return Cohomology(K, field, reps, coords, nbound)


def cup_cochains(K: SimplicialComplex, p: int, a: Sequence, q: int, b: Sequence, field: Field) -> list:
    """Alexander-Whitney cup product of a p-cochain and a q-cochain."""
    ip, iq = K.index(p), K.index(q)
    out = []
    for s in K.faces(p + q):
        x = a[ip[s[:p + 1]]]
        y = b[iq[s[p:]]] if x != 0 else 0
        out.append(field.mul(x, y) if x != 0 and y != 0 else field.zero)
    return out


def cohomology_ring(K: SimplicialComplex, field: Field = QQ, check: bool = True) -> GradedRing:
    H = cohomology(K, field)
    degrees, labels, reps = [], [], []
    offsets = []
    for d, rs in enumerate(H.reps):
        offsets.append(len(degrees))
        for i, r in enumerate(rs):
            degrees.append(d)
            labels.append(f"h{d}_{i}")
            reps.append((d, r))
    table: dict[tuple[int, int], dict[int, object]] = {}
    for i, (p, a) in enumerate(reps):
        for j, (q, b) in enumerate(reps):
            if p + q > K.dim or not H.reps[p + q]:
                continue
            c = H.reduce(p + q, cup_cochains(K, p, a, q, b, field))
            prod = {offsets[p + q] + k: x for k, x in enumerate(c) if x != 0}
            if prod:
                table[(i, j)] = prod
    unit = None
    if H.reps[0]:
        c = H.reduce(0, [field.one] * len(K.faces(0)))
        unit = {k: x for k, x in enumerate(c) if x != 0}
    R = GradedRing(field, degrees, table, labels, unit)
    if check:
        R.validate()
    return R


def ring_invariants_stable(K: SimplicialComplex, field: Field = QQ) -> bool:
    """Cup-length and zero-divisor cup-length agree under the reversed vertex order."""
    a = cohomology_ring(K, field)
    b = cohomology_ring(K.reversed_order(), field)
    return (cup_length(a), zero_divisor_cuplength(a)) == (cup_length(b), zero_divisor_cuplength(b))


def bounds_report(K: SimplicialComplex, field: Field = QQ) -> dict:
    """Lower bounds for dcat and dTC; mod-2 values are classical (cat, TC) bounds only."""
    rq = cohomology_ring(K, QQ)
    r2 = cohomology_ring(K, GF2)
    report = {
        "dim": K.dim,
        "dcat_lower": cup_length(rq),
        "dTC_lower": zero_divisor_cuplength(rq),
        "classical_cat_lower_Z2": cup_length(r2),
        "classical_TC_lower_Z2": zero_divisor_cuplength(r2),
        "z2_note": "Z/2 values bound cat and TC; they are not claimed as bounds for dcat or dTC",
        "betti_Q": betti(K, QQ),
        "betti_Z2": betti(K, GF2),
    }
    if field not in (QQ, GF2):
        rf = cohomology_ring(K, field)
        report.update({f"cup_length_{field.name}": cup_length(rf),
                       f"zero_divisor_cup_length_{field.name}": zero_divisor_cuplength(rf)})
    report["field"] = field.name
    return report
