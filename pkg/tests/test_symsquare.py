import numpy as np
import pytest

from distmotion.fixtures import fixture
from distmotion.homology import betti
from distmotion.linalg import GF2, QQ
from distmotion.symsquare import (NotOrderPreserving, barycentric_poset_subdivision, basepoint_map, delta_from_ordered,
                                  diagonal_check, diagonal_map, dold_check, expected_euler, fixed_vertices,
                                  product_poset_complex, sp2_bound_check, staircase_square, symmetric_square,
                                  with_vertex_action, z2_quotient)


def dense_boundary(D, d):
    M = np.zeros((D.count(d - 1), D.count(d)))
    for j, col in enumerate(D.boundary_columns(d)):
        for i, v in col.items():
            M[i, j] = v
    return M


def invariant_betti(D):
    """Rational betti of the swap-invariant chains: the transfer identifies them with the quotient."""
    rank = lambda M: int(np.linalg.matrix_rank(M)) if M.size else 0  # noqa: E731
    P = []
    for d in range(D.dim + 1):
        n = D.count(d)
        A = np.eye(n)
        A[D.action[d], np.arange(n)] += 1
        P.append(A / 2)
    dims = [rank(p) for p in P]
    bd = [0] + [rank(dense_boundary(D, d) @ P[d]) for d in range(1, D.dim + 1)] + [0]
    out = [dims[d] - bd[d] - bd[d + 1] for d in range(D.dim + 1)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def trim(b):
    b = list(b)
    while len(b) > 1 and b[-1] == 0:
        b.pop()
    return b


# ---------------------------------------------------------------- cell products

def test_circle_cell_counts():
    assert product_poset_complex(fixture("S1")).counts_by_dim() == [9, 18, 9]


def test_sphere_cell_count():
    assert len(product_poset_complex(fixture("S2")).cells) == 196


def test_swap_is_involution():
    P = product_poset_complex(fixture("S2"))
    assert all(P.swap[P.swap[c]] == c for c in range(len(P.cells)))
    assert all(P.dim(P.swap[c]) == P.dim(c) for c in range(len(P.cells)))


def test_subdivision_homology_is_torus():
    D = barycentric_poset_subdivision(product_poset_complex(fixture("S1")))
    assert D.check_face_identities()
    assert trim(D.betti(QQ)) == [1, 2, 1]


@pytest.mark.parametrize("name", ["S1", "figure8"])
def test_subdivision_matches_kunneth(name):
    K = fixture(name)
    D = barycentric_poset_subdivision(product_poset_complex(K))
    for field in (QQ, GF2):
        b = betti(K, field)
        kun = [sum(b[i] * b[k - i] for i in range(len(b)) if 0 <= k - i < len(b)) for k in range(2 * len(b) - 1)]
        assert trim(D.betti(field)) == trim(kun)


def test_swap_fixes_exactly_the_diagonal():
    K = fixture("S1")
    P = product_poset_complex(K)
    D = barycentric_poset_subdivision(P)
    fixed = {P.cells[v] for v in fixed_vertices(D)}
    assert fixed == {(f, f) for f in K.all_faces()}
    Ds, n = staircase_square(K)
    assert fixed_vertices(Ds) == [a * n + a for a in range(n)]


def test_non_order_preserving_action_rejected():
    D = delta_from_ordered([(0,), (1,), (0, 1)])
    with pytest.raises(NotOrderPreserving):
        with_vertex_action(D, lambda v: 1 - v)


# ---------------------------------------------------------------- quotients

@pytest.mark.parametrize("name,expected", [("S1", [1, 1]), ("S2", [1, 0, 1, 0, 1]), ("T2", [1, 2, 2, 2, 1])])
def test_quotient_betti(name, expected):
    S = symmetric_square(fixture(name))
    assert trim(S.betti(QQ)) == expected
    if name != "T2":  # the dense oracle is slow on the torus
        assert trim(S.betti(QQ)) == invariant_betti(S.cover)


def test_quotient_betti_projective_plane():
    S = symmetric_square(fixture("RP2"))
    assert trim(S.betti(QQ)) == [1]
    assert trim(S.betti(GF2)) == [1, 1, 1, 1, 1]


@pytest.mark.parametrize("name", ["S1", "S2", "RP2", "T2", "figure8"])
def test_quotient_euler_characteristic(name):
    K = fixture(name)
    S = symmetric_square(K)
    assert S.complex.euler_characteristic() == expected_euler(K)
    assert S.complex.check_face_identities()


def test_point_and_two_points():
    assert symmetric_square(fixture("point")).betti(QQ) == [1]
    assert symmetric_square(fixture("two_points")).betti(QQ) == [3]


def test_quotient_requires_action():
    with pytest.raises(ValueError):
        z2_quotient(delta_from_ordered([(0,), (1,), (0, 1)]))


@pytest.mark.parametrize("name", ["S1", "S2"])
def test_models_agree(name):
    K = fixture(name)
    a, b = symmetric_square(K, "staircase"), symmetric_square(K, "barycentric")
    for field in (QQ, GF2):
        assert trim(a.betti(field)) == trim(b.betti(field))
    assert a.complex.euler_characteristic() == b.complex.euler_characteristic()


def test_unknown_model():
    with pytest.raises(ValueError):
        symmetric_square(fixture("S1"), "cubical")


# ---------------------------------------------------------------- maps and checks

@pytest.mark.parametrize("model", ["staircase", "barycentric"])
def test_chain_maps_commute(model):
    S = symmetric_square(fixture("S1"), model)
    assert diagonal_map(S).commutes() and basepoint_map(S, 1).commutes()


def test_diagonal_degree_zero():
    S = symmetric_square(fixture("T2"))
    assert diagonal_map(S).homology_rank(0) == 1


def test_bad_basepoint():
    with pytest.raises(ValueError):
        basepoint_map(symmetric_square(fixture("S1")), 7)


@pytest.mark.parametrize("name", ["S1", "S2", "RP2"])
@pytest.mark.parametrize("field", [QQ, GF2], ids=["Q", "Z2"])
def test_dold_split_mono(name, field):
    r = dold_check(symmetric_square(fixture(name)), field)
    assert r["chain_map"] and r["split_mono"] and r["xi_ranks"] == betti(fixture(name), field)


def test_dold_other_basepoint():
    assert dold_check(symmetric_square(fixture("T2")), QQ, x0=3)["split_mono"]


@pytest.mark.parametrize("name", ["S1", "S2"])
def test_diagonal_surjective_rationally(name):
    r = diagonal_check(symmetric_square(fixture(name)), QQ)
    assert r["chain_map"] and r["surjective"]


def test_diagonal_on_circle_mod_two_reports():
    # the degree-one class pulls back to twice a generator, so it dies mod 2
    r = diagonal_check(symmetric_square(fixture("S1")), GF2)
    assert r["delta_ranks"] == [1, 0] and not r["surjective"]


def test_bound_check_torus():
    r = sp2_bound_check(fixture("T2"), QQ)
    assert r["certifies_dcat_ge_2"] and r["product_length"] == 2


def test_bound_check_sphere_not_certified():
    r = sp2_bound_check(fixture("S2"), QQ)
    assert not r["certifies_dcat_ge_2"] and r["product_length"] == 1


def test_bound_check_barycentric_circle():
    r = sp2_bound_check(fixture("S1"), QQ, model="barycentric")
    assert r["product_length"] == 1 and r["chain_map"]
