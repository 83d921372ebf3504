"""Exact linear algebra over Q and Z/p.

Dense routines work on lists of rows; ``SparseReducer`` handles the large,
very sparse boundary matrices of product and quotient complexes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Field:
    """Coefficient field: ``p == 0`` means the rationals."""

    p: int = 0

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"Z{self.p}"

    @property
    def zero(self):
        return Fraction(0) if self.p == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.p == 0 else 1

    def __call__(self, x):
        if self.p == 0:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
        return int(x) % self.p

    def inv(self, x):
        if self.p == 0:
            return 1 / x
        return pow(x, -1, self.p)

    def mul(self, a, b):
        return a * b if self.p == 0 else (a * b) % self.p

    def add(self, a, b):
        return a + b if self.p == 0 else (a + b) % self.p

    def sub(self, a, b):
        return a - b if self.p == 0 else (a - b) % self.p

    def neg(self, a):
        return -a if self.p == 0 else (-a) % self.p


QQ = Field(0)
GF2 = Field(2)


def parse_field(name: str) -> Field:
    key = name.strip().upper().replace("/", "")
    if key in ("Q", "QQ"):
        return QQ
    if key.startswith("Z") and key[1:].isdigit():
        p = int(key[1:])
        if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ValueError(f"Z/{p} is not a field")
        return Field(p)
    raise ValueError(f"unknown field {name!r}; expected Q or Zp")


def row_reduce(rows: Sequence[Sequence], field: Field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [[field(x) for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.mul(inv, x) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [field.sub(a, field.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], field: Field) -> int:
    return len(row_reduce(rows, field)[1])


def nullspace(rows: Sequence[Sequence], ncols: int, field: Field) -> list[list]:
    """Basis of {v : A v = 0} for A given by ``rows`` with ``ncols`` columns."""
    if not rows:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    red, pivots = row_reduce(rows, field)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for row, pc in zip(red, pivots):
            v[pc] = field.neg(row[f])
        basis.append(v)
    return basis


def transpose(rows: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


class Coordinates:
    """Coordinates of vectors in the span of independent ``basis`` vectors.

    Vectors may be dense sequences or sparse dicts. ``coords(v)`` raises
    ``ValueError`` when ``v`` is outside the span.
    """

    def __init__(self, basis: Sequence, dim: int, field: Field):
        self.field = field
        self.dim = dim
        self.k = len(basis)
        self._piv: dict[int, tuple[dict, dict]] = {}
        for i, b in enumerate(basis):
            vec, combo = self._reduce(_as_sparse(b, field), {i: field.one})
            if not vec:
                raise ValueError("basis vectors are linearly dependent")
            self._piv[max(vec)] = (vec, combo)

    def _reduce(self, v: dict, combo: dict) -> tuple[dict, dict]:
        f = self.field
        while v:
            low = max(v)
            entry = self._piv.get(low)
            if entry is None:
                break
            pv, pc = entry
            factor = f.mul(v[low], f.inv(pv[low]))
            _axpy(v, f.neg(factor), pv, f)
            _axpy(combo, f.neg(factor), pc, f)
        return v, combo

    def coords(self, v) -> list:
        f = self.field
        rest, combo = self._reduce(_as_sparse(v, f), {})
        if rest:
            raise ValueError("vector not in span")
        # v - sum(factor * pivot) = 0 and combo accumulated -factor * (pivot combos)
        return [f.neg(combo.get(i, f.zero)) for i in range(self.k)]


def _as_sparse(v, field: Field) -> dict:
    if isinstance(v, dict):
        items = v.items()
    else:
        items = enumerate(v)
    out = {}
    for k, x in items:
        x = field(x)
        if x != 0:
            out[k] = x
    return out


def _axpy(y: dict, a, x: dict, field: Field) -> None:
    """y += a * x in place, dropping zeros."""
    for k, val in x.items():
        nv = field.add(y.get(k, field.zero), field.mul(a, val))
        if nv == 0:
            y.pop(k, None)
        else:
            y[k] = nv


def sparse_kernel(columns: Sequence[dict], field: Field) -> list[dict]:
    """Basis of {c : sum_j c_j columns[j] = 0}, as sparse dicts over column indices."""
    piv: dict[int, tuple[dict, dict]] = {}
    kernel = []
    for j, col in enumerate(columns):
        v = _as_sparse(col, field)
        combo = {j: field.one}
        while v:
            low = max(v)
            entry = piv.get(low)
            if entry is None:
                break
            pv, pc = entry
            factor = field.mul(v[low], field.inv(pv[low]))
            _axpy(v, field.neg(factor), pv, field)
            _axpy(combo, field.neg(factor), pc, field)
        if v:
            piv[max(v)] = (v, combo)
        else:
            kernel.append(combo)
    return kernel


class SparseReducer:
    """Incremental column reduction for sparse vectors (dict index -> value).

    Pivot of a reduced column is its largest index, as in the standard
    boundary-matrix reduction.
    """

    def __init__(self, field: Field):
        self.field = field
        self._cols: dict[int, dict[int, object]] = {}

    def __len__(self) -> int:
        return len(self._cols)

    def reduce(self, col: dict[int, object]) -> dict[int, object]:
        f = self.field
        v = {k: f(x) for k, x in col.items() if f(x) != 0}
        while v:
            low = max(v)
            piv = self._cols.get(low)
            if piv is None:
                return v
            factor = f.mul(v[low], f.inv(piv[low]))
            for k, x in piv.items():
                nv = f.sub(v.get(k, f.zero), f.mul(factor, x))
                if nv == 0:
                    v.pop(k, None)
                else:
                    v[k] = nv
        return v

    def add(self, col: dict[int, object]) -> bool:
        """Insert ``col``; return True when it enlarged the span."""
        v = self.reduce(col)
        if not v:
            return False
        self._cols[max(v)] = v
        return True

    def contains(self, col: dict[int, object]) -> bool:
        return not self.reduce(col)


def sparse_rank(columns: Iterable[dict[int, object]], field: Field) -> int:
    red = SparseReducer(field)
    return sum(1 for c in columns if red.add(c))
