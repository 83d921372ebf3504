import itertools
import json

import numpy as np
import pytest

from distmotion.fixtures import FIXTURES, fixture
from distmotion.homology import (MalformedInput, NonSimplex, basic_zero_divisors, betti, bounds_report,
                                 cohomology_ring, cup_length, load_complex, ring_invariants_stable,
                                 zero_divisor_cuplength, zero_divisor_cuplength_basic)
from distmotion.linalg import GF2, QQ, Field

CLOSED = ["S1", "S2", "S3", "T2", "Sigma2", "RP2", "CP2", "S1xS2", "T3"]


def boundary_matrix(K, d):
    rows = {f: i for i, f in enumerate(K.faces(d - 1))}
    M = np.zeros((len(rows), len(K.faces(d))), dtype=np.int64)
    for j, s in enumerate(K.faces(d)):
        for i in range(len(s)):
            M[rows[s[:i] + s[i + 1:]], j] = (-1) ** i
    return M


def gf2_rank(M):
    M = (np.asarray(M) % 2).astype(np.uint8)
    r = 0
    for c in range(M.shape[1]):
        piv = next((i for i in range(r, M.shape[0]) if M[i, c]), None)
        if piv is None:
            continue
        M[[r, piv]] = M[[piv, r]]
        for i in range(M.shape[0]):
            if i != r and M[i, c]:
                M[i] ^= M[r]
        r += 1
    return r


def oracle_betti(K, p):
    rank = (lambda M: int(np.linalg.matrix_rank(M.astype(float))) if M.size else 0) if p == 0 else gf2_rank
    ranks = [0] + [rank(boundary_matrix(K, d)) for d in range(1, K.dim + 1)] + [0]
    return [len(K.faces(d)) - ranks[d] - ranks[d + 1] for d in range(K.dim + 1)]


# ---------------------------------------------------------------- loading

def test_load_boundary_of_tetrahedron():
    K = load_complex({"vertices": 4, "maximal": [list(c) for c in itertools.combinations(range(4), 3)]})
    assert K.n_vertices == 4 and len(K.faces(2)) == 4


def test_load_json_text_three_cycle():
    K = load_complex(json.dumps({"vertices": 3, "maximal": [[0, 1], [1, 2], [0, 2]]}))
    assert betti(K) == [1, 1]


def test_load_errors():
    with pytest.raises(MalformedInput):
        load_complex("{not json")
    with pytest.raises(MalformedInput):
        load_complex({"vertices": 2, "maximal": [[0, 5]]})
    with pytest.raises(NonSimplex):
        load_complex({"vertices": 3, "maximal": [[0, 0, 1]]})


def test_torus_fixture():
    K = fixture("T2")
    assert K.euler_characteristic() == 0 and K.f_vector() == [7, 21, 14]


# ---------------------------------------------------------------- betti numbers

@pytest.mark.parametrize("name,field,expected", [
    ("S2", QQ, [1, 0, 1]), ("T2", QQ, [1, 2, 1]), ("RP2", GF2, [1, 1, 1]), ("RP2", QQ, [1, 0, 0]),
    ("Sigma2", QQ, [1, 4, 1]), ("CP2", QQ, [1, 0, 1, 0, 1]), ("figure8", QQ, [1, 2]),
])
def test_betti_examples(name, field, expected):
    assert betti(fixture(name), field) == expected


@pytest.mark.parametrize("name", sorted(FIXTURES))
@pytest.mark.parametrize("field", [QQ, GF2], ids=["Q", "Z2"])
def test_betti_matches_gauss_oracle(name, field):
    K = fixture(name)
    assert betti(K, field) == oracle_betti(K, field.p)


@pytest.mark.parametrize("name", sorted(FIXTURES))
@pytest.mark.parametrize("field", [QQ, GF2, Field(3)], ids=["Q", "Z2", "Z3"])
def test_euler_characteristic(name, field):
    K = fixture(name)
    b = betti(K, field)
    assert sum((-1) ** d * x for d, x in enumerate(b)) == K.euler_characteristic()


@pytest.mark.parametrize("name", CLOSED)
def test_poincare_symmetry(name):
    K = fixture(name)
    b2 = betti(K, GF2)
    assert b2 == b2[::-1]
    if name != "RP2":
        bq = betti(K, QQ)
        assert bq == bq[::-1]


# ---------------------------------------------------------------- rings

def test_sphere_ring():
    R = cohomology_ring(fixture("S2"))
    (g,) = R.positive_basis()
    assert R.degrees[g] == 2 and R.mul({g: 1}, {g: 1}) == {}


def test_torus_ring():
    R = cohomology_ring(fixture("T2"))
    a, b = [i for i in R.positive_basis() if R.degrees[i] == 1]
    ab, ba = R.mul({a: 1}, {b: 1}), R.mul({b: 1}, {a: 1})
    assert ab and ba == {k: -v for k, v in ab.items()}
    assert R.mul({a: 1}, {a: 1}) == {} and R.mul({b: 1}, {b: 1}) == {}


def test_projective_plane_square_mod_two():
    R = cohomology_ring(fixture("RP2"), GF2)
    (w,) = [i for i in R.positive_basis() if R.degrees[i] == 1]
    assert R.mul({w: 1}, {w: 1})


@pytest.mark.parametrize("name", ["T2", "RP2", "CP2", "S1xS2"])
def test_ring_axioms(name):
    for field in (QQ, GF2):
        R = cohomology_ring(fixture(name), field, check=False)
        assert R.check_graded_commutative() and R.check_associative() and R.check_degrees()


@pytest.mark.parametrize("name,expected", [("Sigma2", 2), ("T2", 2), ("CP2", 2), ("S2", 1), ("S1xS2", 2), ("T3", 3)])
def test_cup_length(name, expected):
    assert cup_length(cohomology_ring(fixture(name))) == expected


def test_cup_length_mod_two_projective_plane():
    assert cup_length(cohomology_ring(fixture("RP2"), GF2)) == 2


@pytest.mark.parametrize("name,expected", [("S2", 2), ("S3", 1), ("Sigma2", 4), ("CP2", 4), ("figure8", 2),
                                           ("T2", 2), ("S1", 1)])
def test_zero_divisor_cup_length(name, expected):
    assert zero_divisor_cuplength(cohomology_ring(fixture(name))) == expected


@pytest.mark.parametrize("name", ["S1", "S2", "S3", "T2", "RP2", "figure8", "S1xS2", "Sigma2"])
def test_span_at_least_basic(name):
    for field in (QQ, GF2):
        R = cohomology_ring(fixture(name), field)
        assert zero_divisor_cuplength(R) >= zero_divisor_cuplength_basic(R)
        assert len(basic_zero_divisors(R)) == len(R.positive_basis())


@pytest.mark.parametrize("name", ["T2", "RP2", "Sigma2", "figure8", "S1xS2"])
def test_reversed_order_stable(name):
    K = fixture(name)
    assert ring_invariants_stable(K, QQ) and ring_invariants_stable(K, GF2)


@pytest.mark.parametrize("name,dcat,dtc", [("T2", 2, 2), ("Sigma2", 2, 4), ("S2", 1, 2)])
def test_bounds_report(name, dcat, dtc):
    r = bounds_report(fixture(name))
    assert (r["dcat_lower"], r["dTC_lower"]) == (dcat, dtc)
    assert "classical" in r["z2_note"] or "cat" in r["z2_note"]


def test_bounds_report_projective_plane_is_classical_only():
    r = bounds_report(fixture("RP2"))
    assert r["dcat_lower"] == 0 and r["classical_cat_lower_Z2"] == 2


@pytest.mark.parametrize("name", ["T2", "Sigma2", "RP2"])
def test_surface_fixture_links_are_circles(name):
    import networkx as nx
    K = fixture(name)
    for v in range(K.n_vertices):
        link = nx.Graph([tuple(x for x in t if x != v) for t in K.faces(2) if v in t])
        assert nx.is_connected(link) and all(d == 2 for _, d in link.degree())
    assert all(sum(1 for t in K.faces(2) if set(e) <= set(t)) == 2 for e in K.faces(1))
