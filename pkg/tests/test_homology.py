import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cechnet.homology import (
    ComplexNotClosed,
    CycleReducer,
    SimplicialComplex,
    betti,
    betti_numbers,
    boundary_matrix,
    rank_gf2,
)

HOLLOW = SimplicialComplex([(0,), (1,), (2,), (0, 1), (1, 2), (0, 2)])
FILLED = SimplicialComplex.closure([(0, 1, 2)])


def annulus8() -> SimplicialComplex:
    """Octagonal annulus: outer ring 0..7, inner ring 8..15."""
    tris = []
    for i in range(8):
        j = (i + 1) % 8
        tris += [(i, j, 8 + i), (j, 8 + i, 8 + j)]
    return SimplicialComplex.closure(tris)


def random_complex(rng: random.Random) -> SimplicialComplex:
    n = rng.randint(1, 8)
    tops = [tuple(rng.sample(range(n), rng.randint(1, min(n, 4)))) for _ in range(rng.randint(1, 10))]
    return SimplicialComplex.closure(tops)


def union_find_components(X: SimplicialComplex) -> int:
    parent = {v: v for v in X.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in X.simplices(1):
        parent[find(a)] = find(b)
    return len({find(v) for v in X.vertices})


def test_boundary_hollow_triangle():
    M = boundary_matrix(HOLLOW, 1)
    assert M.shape == (3, 3)
    assert (M.data.sum(axis=0) == 2).all()


def test_boundary_filled_triangle():
    M = boundary_matrix(FILLED, 2)
    assert M.shape == (3, 1)
    assert (M.data == 1).all()


def test_boundary_single_vertex():
    assert boundary_matrix(SimplicialComplex([(0,)]), 1).shape == (1, 0)


def test_boundary_rejects_open_complex():
    with pytest.raises(ComplexNotClosed, match="complex not closed"):
        boundary_matrix(SimplicialComplex([(0, 1)]), 1)


def test_rank_examples():
    # hand elimination: rows v0,v1,v2; columns 01,02,12 -> two pivots
    assert rank_gf2(boundary_matrix(HOLLOW, 1)) == 2
    assert rank_gf2(np.zeros((3, 4), dtype=np.uint8)) == 0
    assert rank_gf2(np.eye(4, dtype=np.uint8)) == 4


def test_rank_against_numpy_on_full_rank_gf2():
    # rows of an upper unitriangular matrix are independent over any field
    M = np.triu(np.ones((6, 6), dtype=np.uint8))
    assert rank_gf2(M) == 6
    M[5] = M[4] ^ M[3]
    assert rank_gf2(M) == 5


@pytest.mark.parametrize("X, expected", [
    (HOLLOW, (1, 1)),
    (FILLED, (1, 0)),
    (SimplicialComplex([(0,), (1,)]), (2, 0)),
    (annulus8(), (1, 1)),
])
def test_betti_small(X, expected):
    assert betti_numbers(X, 1) == expected


def test_betti_tetrahedron_shell():
    shell = SimplicialComplex.closure(itertools.combinations(range(4), 3))
    assert betti_numbers(shell, 2) == (1, 0, 1)


def test_filling_triangle_kills_cycle():
    assert betti(HOLLOW, 1) - betti(FILLED, 1) == 1
    assert betti(HOLLOW, 0) == betti(FILLED, 0)


def test_serialization_round_trip():
    X = annulus8()
    assert SimplicialComplex.from_text(X.to_text()) == X
    assert FILLED.to_text() == "0\n1\n2\n0 1\n0 2\n1 2\n0 1 2\n"


@settings(max_examples=100)
@given(st.randoms(use_true_random=False))
def test_boundary_of_boundary_is_zero(rng):
    X = random_complex(rng)
    for k in range(2, X.dim + 1):
        a = boundary_matrix(X, k - 1).data.astype(int)
        b = boundary_matrix(X, k).data.astype(int)
        assert not ((a @ b) % 2).any()


@settings(max_examples=100)
@given(st.randoms(use_true_random=False))
def test_beta0_matches_union_find(rng):
    X = random_complex(rng)
    assert betti(X, 0) == union_find_components(X)


@settings(max_examples=50)
@given(st.randoms(use_true_random=False))
def test_betti_invariant_under_relabeling(rng):
    X = random_complex(rng)
    vs = X.vertices
    perm = dict(zip(vs, rng.sample(range(100), len(vs))))
    assert betti_numbers(X.relabeled(perm), 2) == betti_numbers(X, 2)


def test_cycle_reducer():
    red = CycleReducer(FILLED)
    assert red.is_boundary([(0, 1), (1, 2), (0, 2)])
    red = CycleReducer(HOLLOW)
    assert not red.is_boundary([(0, 1), (1, 2), (0, 2)])
    assert red.add_if_independent([(0, 1), (1, 2), (0, 2)])
    assert not red.add_if_independent([(0, 2), (1, 2), (0, 1)])
