"""Symmetric square SP^2(K) as a Delta-complex quotient of an equivariant model of K x K.

Two swap-equivariant models of K x K are available:

* ``"staircase"`` (default): the ordered staircase triangulation. The swap
  (v, w) -> (w, v) preserves the product vertex order, so it acts on
  ordered simplices and the quotient is immediate. Small enough for surfaces.
* ``"barycentric"``: chains of cells sigma x tau. Larger; used as a cross-check.

The diagonal and basepoint maps are simplicial from K (staircase) or from
the barycentric subdivision of K (barycentric model).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .homology import SimplicialComplex, cohomology, cohomology_ring, betti as simplicial_betti, product_complex
from .homology import _iterated_span_length
from .linalg import QQ, Field, SparseReducer, sparse_kernel, sparse_rank

MODELS = ("staircase", "barycentric")


class NotOrderPreserving(ValueError):
    pass


# ---------------------------------------------------------------- cell products

@dataclass
class CellProductComplex:
    """Cells sigma x tau of K x K with the face poset and the swap involution."""

    K: SimplicialComplex
    cells: list[tuple[tuple[int, ...], tuple[int, ...]]]
    index: dict
    swap: list[int]

    def dim(self, c: int) -> int:
        s, t = self.cells[c]
        return len(s) + len(t) - 2

    def leq(self, a: int, b: int) -> bool:
        (s1, t1), (s2, t2) = self.cells[a], self.cells[b]
        return set(s1) <= set(s2) and set(t1) <= set(t2)

    def counts_by_dim(self) -> list[int]:
        top = max(self.dim(c) for c in range(len(self.cells)))
        out = [0] * (top + 1)
        for c in range(len(self.cells)):
            out[self.dim(c)] += 1
        return out

    def below(self, c: int) -> list[int]:
        """Proper subcells of c."""
        s, t = self.cells[c]
        out = []
        for a in _subfaces(s):
            for b in _subfaces(t):
                if (a, b) != (s, t):
                    out.append(self.index[(a, b)])
        return out


def _subfaces(s: tuple[int, ...]) -> list[tuple[int, ...]]:
    return [c for k in range(1, len(s) + 1) for c in itertools.combinations(s, k)]


def product_poset_complex(K: SimplicialComplex) -> CellProductComplex:
    faces = sorted(K.all_faces(), key=lambda f: (len(f), f))
    # sorted by total dimension so chains of cells are increasing in index
    cells = sorted(itertools.product(faces, faces), key=lambda st: (len(st[0]) + len(st[1]), st))
    index = {c: i for i, c in enumerate(cells)}
    swap = [index[(t, s)] for s, t in cells]
    return CellProductComplex(K, cells, index, swap)


# ---------------------------------------------------------------- Delta-complexes

@dataclass
class DeltaComplex:
    """Ordered simplices per dimension with face maps.

    ``faces[d][j][i]`` is the index (in dimension d-1) of the i-th face of
    simplex j. ``labels[d][j]`` is the ordered vertex tuple (or orbit
    representative) of the simplex. ``action[d]`` is an optional involution
    permuting the d-simplices.
    """

    labels: list[list[tuple]]
    faces: list[list[tuple[int, ...]]]
    action: list[list[int]] | None = None
    _index: list[dict] = dc_field(default_factory=list, repr=False)

    def __post_init__(self):
        self._index = [{s: j for j, s in enumerate(ls)} for ls in self.labels]

    @property
    def dim(self) -> int:
        return len(self.labels) - 1

    def count(self, d: int) -> int:
        return len(self.labels[d]) if 0 <= d <= self.dim else 0

    def f_vector(self) -> list[int]:
        return [len(ls) for ls in self.labels]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.f_vector()))

    def index(self, d: int) -> dict:
        return self._index[d] if 0 <= d <= self.dim else {}

    def boundary_columns(self, d: int) -> list[dict[int, int]]:
        """Boundary of each d-simplex as a sparse integer vector over (d-1)-simplices."""
        if d <= 0 or d > self.dim:
            return [{} for _ in range(self.count(d))]
        cols = []
        for fs in self.faces[d]:
            col: dict[int, int] = {}
            for i, f in enumerate(fs):
                col[f] = col.get(f, 0) + (-1) ** i
            cols.append({k: v for k, v in col.items() if v})
        return cols

    def coboundary_columns(self, d: int) -> list[dict[int, int]]:
        """Coboundary of each d-cochain basis vector, over (d+1)-simplices."""
        cols: list[dict[int, int]] = [{} for _ in range(self.count(d))]
        if d + 1 > self.dim:
            return cols
        for j, fs in enumerate(self.faces[d + 1]):
            for i, f in enumerate(fs):
                cols[f][j] = cols[f].get(j, 0) + (-1) ** i
        return [{k: v for k, v in c.items() if v} for c in cols]

    def check_face_identities(self) -> bool:
        """d_i d_j = d_{j-1} d_i for i < j."""
        for d in range(2, self.dim + 1):
            for fs in self.faces[d]:
                for j in range(len(fs)):
                    for i in range(j):
                        if self.faces[d - 1][fs[j]][i] != self.faces[d - 1][fs[i]][j - 1]:
                            return False
        return True

    def betti(self, field: Field = QQ) -> list[int]:
        ranks = [0] + [sparse_rank(self.boundary_columns(d), field) for d in range(1, self.dim + 1)] + [0]
        return [self.count(d) - ranks[d] - ranks[d + 1] for d in range(self.dim + 1)]


def delta_from_ordered(simplices: Sequence[tuple]) -> DeltaComplex:
    """Delta-complex of a family of ordered vertex tuples closed under deleting vertices."""
    by_dim: dict[int, set] = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, set()).add(tuple(s))
    top = max(by_dim)
    labels = [sorted(by_dim.get(d, ())) for d in range(top + 1)]
    index = [{s: j for j, s in enumerate(ls)} for ls in labels]
    faces = [[() for _ in labels[0]]]
    for d in range(1, top + 1):
        faces.append([tuple(index[d - 1][s[:i] + s[i + 1:]] for i in range(d + 1)) for s in labels[d]])
    return DeltaComplex(labels, faces)


def delta_from_simplicial(K: SimplicialComplex) -> DeltaComplex:
    return delta_from_ordered(K.all_faces())


def with_vertex_action(D: DeltaComplex, vmap) -> DeltaComplex:
    """Attach the action induced by a vertex involution; it must preserve vertex order on simplices."""
    action = []
    for d, ls in enumerate(D.labels):
        idx = D.index(d)
        perm = []
        for s in ls:
            img = tuple(vmap(v) for v in s)
            if img not in idx:
                raise NotOrderPreserving(f"image of {s} is not an ordered simplex")
            perm.append(idx[img])
        action.append(perm)
    return DeltaComplex(D.labels, D.faces, action)


# ---------------------------------------------------------------- equivariant models

def barycentric_poset_subdivision(P: CellProductComplex) -> DeltaComplex:
    """Order complex of the cell poset: k-simplices are strict chains of k+1 cells."""
    below = [P.below(c) for c in range(len(P.cells))]
    chains: list[tuple[int, ...]] = []

    def grow(chain):
        chains.append(chain)
        for b in below[chain[0]]:
            grow((b,) + chain)

    for c in range(len(P.cells)):
        grow((c,))
    D = delta_from_ordered(chains)
    return with_vertex_action(D, lambda v: P.swap[v])


def staircase_square(K: SimplicialComplex) -> tuple[DeltaComplex, int]:
    """Ordered staircase triangulation of K x K with the swap; vertex (a, b) has id a * n + b."""
    n = K.n_vertices
    D = delta_from_simplicial(product_complex(K, K))
    return with_vertex_action(D, lambda v: (v % n) * n + v // n), n


def fixed_vertices(D: DeltaComplex) -> list[int]:
    return [j for j, g in enumerate(D.action[0]) if g == j]


@dataclass
class Quotient:
    complex: DeltaComplex
    # orbit[d][j] = index of the image of simplex j of the cover
    orbit: list[list[int]]


def z2_quotient(D: DeltaComplex) -> Quotient:
    """Delta-complex on the orbits of an order-preserving involution."""
    if D.action is None:
        raise ValueError("complex carries no action")
    labels, faces, orbit = [], [], []
    for d in range(D.dim + 1):
        g = D.action[d]
        reps = sorted({min(j, g[j]) for j in range(D.count(d))})
        where = {j: k for k, j in enumerate(reps)}
        orbit.append([where[min(j, g[j])] for j in range(D.count(d))])
        labels.append([D.labels[d][j] for j in reps])
        if d == 0:
            faces.append([() for _ in reps])
        else:
            faces.append([tuple(orbit[d - 1][f] for f in D.faces[d][j]) for j in reps])
        # faces of an orbit must not depend on the representative
        for j in range(D.count(d)):
            if d and tuple(orbit[d - 1][f] for f in D.faces[d][j]) != faces[d][orbit[d][j]]:
                raise NotOrderPreserving("face maps do not descend to the quotient")
    return Quotient(DeltaComplex(labels, faces), orbit)


# ---------------------------------------------------------------- chain maps

@dataclass
class InducedMap:
    source: DeltaComplex
    target: DeltaComplex
    # matrices[d][j] = image of source simplex j as a sparse integer vector
    matrices: list[list[dict[int, int]]]
    name: str = "map"

    def commutes(self) -> bool:
        """Exact check of boundary . f == f . boundary in every degree."""
        for d in range(1, self.source.dim + 1):
            sb = self.source.boundary_columns(d)
            tb = self.target.boundary_columns(d) if d <= self.target.dim else []
            for j in range(self.source.count(d)):
                left: dict[int, int] = {}
                for t, c in self.matrices[d][j].items():
                    for f, e in tb[t].items():
                        left[f] = left.get(f, 0) + c * e
                right: dict[int, int] = {}
                for f, e in sb[j].items():
                    for t, c in self.matrices[d - 1][f].items():
                        right[t] = right.get(t, 0) + c * e
                if {k: v for k, v in left.items() if v} != {k: v for k, v in right.items() if v}:
                    return False
        return True

    def homology_rank(self, d: int, field: Field = QQ) -> int:
        """Rank of the induced map on H_d."""
        if d > self.target.dim:
            return 0
        cycles = sparse_kernel(self.source.boundary_columns(d), field)
        red = SparseReducer(field)
        nb = sum(1 for c in self.target.boundary_columns(d + 1) if red.add(c))
        total = nb
        for z in cycles:
            img: dict[int, object] = {}
            for j, a in z.items():
                for t, c in self.matrices[d][j].items():
                    img[t] = field.add(img.get(t, field.zero), field.mul(a, field(c)))
            if red.add({k: v for k, v in img.items() if v != 0}):
                total += 1
        return total - nb

    def pullback(self, d: int, cochain: Sequence, field: Field = QQ) -> list:
        """f^* of a d-cochain on the target, as a vector over source d-simplices."""
        out = []
        for col in self.matrices[d]:
            acc = field.zero
            for t, c in col.items():
                acc = field.add(acc, field.mul(field(c), cochain[t]))
            out.append(acc)
        return out


def _simplicial_map(source: DeltaComplex, target: DeltaComplex, vmap, name: str) -> InducedMap:
    """Chain map of an order-preserving vertex map; degenerate images go to zero."""
    mats = []
    for d, ls in enumerate(source.labels):
        idx = target.index(d)
        col = []
        for s in ls:
            img = tuple(vmap(v) for v in s)
            if len(set(img)) < len(img):
                col.append({})
            else:
                col.append({idx[img]: 1})
        mats.append(col)
    return InducedMap(source, target, mats, name)


def compose_with_quotient(f: InducedMap, q: Quotient) -> InducedMap:
    mats = []
    for d, cols in enumerate(f.matrices):
        out = []
        for col in cols:
            img: dict[int, int] = {}
            for t, c in col.items():
                o = q.orbit[d][t]
                img[o] = img.get(o, 0) + c
            out.append({k: v for k, v in img.items() if v})
        mats.append(out)
    return InducedMap(f.source, q.complex, mats, f.name)


# ---------------------------------------------------------------- SP^2 bundles

def barycentric_subdivision(K: SimplicialComplex) -> tuple[SimplicialComplex, list[tuple[int, ...]]]:
    """Order complex of the face poset; vertex i is the i-th face in (dim, lex) order."""
    faces = sorted(K.all_faces(), key=lambda f: (len(f), f))
    idx = {f: i for i, f in enumerate(faces)}
    maximal = []

    def grow(chain):
        top = faces[chain[-1]]
        if len(top) == 1:
            maximal.append(chain)
            return
        for i in range(len(top)):
            grow(chain + [idx[top[:i] + top[i + 1:]]])

    for s in K.maximal:
        grow([idx[tuple(s)]])
    return SimplicialComplex(len(faces), maximal), faces


@dataclass
class SymmetricSquare:
    K: SimplicialComplex
    model: str
    cover: DeltaComplex
    quotient: Quotient
    # complex on which the diagonal and basepoint maps are simplicial
    base: SimplicialComplex
    _pair: object = dc_field(repr=False, default=None)

    @property
    def complex(self) -> DeltaComplex:
        return self.quotient.complex

    def betti(self, field: Field = QQ) -> list[int]:
        return self.complex.betti(field)

    def _to_cover(self, a, b) -> int:
        return self._pair(a, b)

    def map_from_base(self, other, name: str) -> InducedMap:
        src = delta_from_simplicial(self.base)
        f = _simplicial_map(src, self.cover, lambda v: self._to_cover(v, other(v)), name)
        return compose_with_quotient(f, self.quotient)


def symmetric_square(K: SimplicialComplex, model: str = "staircase") -> SymmetricSquare:
    if model == "staircase":
        D, n = staircase_square(K)
        return SymmetricSquare(K, model, D, z2_quotient(D), K, lambda a, b: a * n + b)
    if model == "barycentric":
        P = product_poset_complex(K)
        D = barycentric_poset_subdivision(P)
        sd, faces = barycentric_subdivision(K)
        return SymmetricSquare(K, model, D, z2_quotient(D), sd,
                               lambda a, b: P.index[(faces[a], faces[b])])
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def diagonal_map(S: SymmetricSquare) -> InducedMap:
    """x -> [x, x]."""
    return S.map_from_base(lambda v: v, "diagonal")


def basepoint_map(S: SymmetricSquare, x0: int = 0) -> InducedMap:
    """x -> [x, x0]."""
    if not 0 <= x0 < S.K.n_vertices:
        raise ValueError(f"basepoint {x0} is not a vertex")
    if S.model == "staircase":
        return S.map_from_base(lambda v: x0, "basepoint")
    _, faces = barycentric_subdivision(S.K)
    b = faces.index((x0,))
    return S.map_from_base(lambda v: b, "basepoint")


def expected_euler(K: SimplicialComplex) -> int:
    """Orbit count: (chi(K x K) + chi(diagonal)) / 2."""
    chi = K.euler_characteristic()
    return (chi * chi + chi) // 2


# ---------------------------------------------------------------- checks

def _cohomology_reps(D: DeltaComplex, d: int, field: Field) -> list[dict[int, object]]:
    cocycles = sparse_kernel(D.coboundary_columns(d), field)
    red = SparseReducer(field)
    if d:
        for c in D.coboundary_columns(d - 1):
            red.add(c)
    return [v for v in cocycles if red.add(v)]


def dold_check(S: SymmetricSquare, field: Field = QQ, x0: int = 0) -> dict:
    """(xi_2)_* has rank beta_k(K) in each degree and beta_k(SP^2) >= beta_k(K)."""
    xi = basepoint_map(S, x0)
    bK = simplicial_betti(S.K, field)
    bS = S.betti(field)
    ranks = [xi.homology_rank(d, field) for d in range(len(bK))]
    return {
        "field": field.name,
        "betti_K": bK,
        "betti_SP2": bS,
        "xi_ranks": ranks,
        "chain_map": xi.commutes(),
        "split_mono": ranks == bK and all(bS[d] >= bK[d] for d in range(len(bK)) if d < len(bS)),
    }


def diagonal_check(S: SymmetricSquare, field: Field = QQ) -> dict:
    """Whether delta_2^* is onto H^*(K); over a field this is injectivity of (delta_2)_*."""
    dg = diagonal_map(S)
    bK = simplicial_betti(S.K, field)
    ranks = [dg.homology_rank(d, field) for d in range(len(bK))]
    return {"field": field.name, "betti_K": bK, "delta_ranks": ranks, "chain_map": dg.commutes(),
            "surjective": ranks == bK}


def sp2_bound_check(K: SimplicialComplex, field: Field = QQ, model: str = "staircase",
                    S: SymmetricSquare | None = None) -> dict:
    """Pull classes of SP^2(K) back along the diagonal and look for a non-zero product of two."""
    if S is None:
        S = symmetric_square(K, model)
    dg = diagonal_map(S)
    base = S.base
    H = cohomology(base, field)
    R = cohomology_ring(base, field, check=False)
    offsets = list(itertools.accumulate([0] + [len(r) for r in H.reps]))
    pulled = []
    for d in range(1, base.dim + 1):
        if d > S.complex.dim or not H.reps[d]:
            continue
        n = S.complex.count(d)
        for rep in _cohomology_reps(S.complex, d, field):
            vec = [rep.get(i, field.zero) for i in range(n)]
            coords = H.reduce(d, dg.pullback(d, vec, field))
            v = {offsets[d] + k: x for k, x in enumerate(coords) if x != 0}
            if v:
                pulled.append(v)
    length = min(_iterated_span_length(R, pulled), 2) if pulled else 0
    return {
        "field": field.name,
        "model": S.model,
        "betti_SP2": S.betti(field),
        "pulled_back_classes": len(pulled),
        "product_length": length,
        "certifies_dcat_ge_2": length >= 2,
        "chain_map": dg.commutes(),
    }
