from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from stratih.complex import boundary_matrix
from stratih.ih import simplicial_chain_complex
from stratih.snf import (EchelonLattice, Reduction, elementary_divisors, homology_ranks,
                         integer_kernel, matmul, rank_q, smith_normal_form)

small_matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n),
                           min_size=m, max_size=m)))


def _sympy_divisors(A):
    S = sympy_snf(Matrix(A), domain=ZZ)
    return sorted(abs(int(S[i, i])) for i in range(min(S.shape)) if S[i, i] != 0)


@settings(max_examples=80, deadline=None)
@given(A=small_matrices)
def test_snf_transforms_and_divisibility(A):
    S, U, V = smith_normal_form(A, transforms=True)
    assert matmul(matmul(U, A), V) == S
    diag = [S[i][i] for i in range(min(len(S), len(S[0])))]
    assert all(S[i][j] == 0 for i in range(len(S)) for j in range(len(S[0])) if i != j)
    nonzero = [d for d in diag if d]
    assert all(d > 0 for d in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@settings(max_examples=80, deadline=None)
@given(A=small_matrices)
def test_snf_matches_sympy(A):
    assert sorted(elementary_divisors(A)) == _sympy_divisors(A)
    assert rank_q(A) == Matrix(A).rank()


def test_known_snf():
    assert elementary_divisors([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]


@settings(max_examples=60, deadline=None)
@given(A=small_matrices)
def test_integer_kernel_is_saturated_basis(A):
    n = len(A[0])
    rows = [{j: v for j, v in enumerate(r) if v} for r in A]
    ker = integer_kernel(rows, list(range(n)))
    assert len(ker) == n - Matrix(A).rank()
    for v in ker:
        assert all(sum(r.get(j, 0) * x for j, x in v.items()) == 0 for r in rows)
    if ker:
        K = [[v.get(j, 0) for j in range(n)] for v in ker]
        assert all(d == 1 for d in elementary_divisors(K))


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_echelon_lattice_coordinates(data):
    n = data.draw(st.integers(2, 6))
    vecs = data.draw(st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n),
                              min_size=1, max_size=4))
    dicts = [{j: x for j, x in enumerate(v) if x} for v in vecs]
    lat = EchelonLattice(dicts, list(range(n)))
    coeffs = data.draw(st.lists(st.integers(-3, 3), min_size=len(lat.vectors),
                                max_size=len(lat.vectors)))
    target = {}
    for c, v in zip(coeffs, lat.vectors):
        for j, x in v.items():
            target[j] = target.get(j, 0) + c * x
    target = {j: x for j, x in target.items() if x}
    assert lat.coordinates(target) == coeffs
    assert lat.sparse_coordinates(target) == {i: c for i, c in enumerate(coeffs) if c}


def test_echelon_lattice_membership():
    lat = EchelonLattice([{0: 2, 1: 2}], [0, 1])
    assert lat.coordinates({0: 4, 1: 4}) == [2]
    assert lat.coordinates({0: 1, 1: 1}) is None
    assert lat.coordinates({0: 2}) is None


@pytest.mark.parametrize("name, betti, torsion", [
    ("circle", [1, 1], [[], []]),
    ("sphere", [1, 0, 1], [[], [], []]),
    ("torus", [1, 2, 1], [[], [], []]),
    ("rp2", [1, 0, 0], [[], [2], []]),
])
def test_simplicial_homology(fixture_strat, name, betti, torsion):
    c = simplicial_chain_complex(fixture_strat(name).base)
    assert homology_ranks(c.sizes, c.boundaries, "Z") == (betti, torsion)


@pytest.mark.parametrize("name", ["circle", "sphere", "torus", "rp2", "cone-t2", "sigma-rp2"])
def test_betti_over_z_equals_rank_over_q(fixture_strat, name):
    c = simplicial_chain_complex(fixture_strat(name, 1).base)
    bz, _ = homology_ranks(c.sizes, c.boundaries, "Z")
    bq, tq = homology_ranks(c.sizes, c.boundaries, "Q")
    assert bz == bq
    assert not any(tq)


def test_reduction_dense_agrees_with_snf(fixture_strat):
    X = fixture_strat("rp2").base
    d2 = boundary_matrix(X, 2)
    dense = [[col.get(r, 0) for col in d2] for r in range(len(X.simplices(1)))]
    assert elementary_divisors(dense).count(2) == 1


@pytest.mark.parametrize("name", ["torus", "rp2"])
def test_tracked_reduction_round_trip(fixture_strat, name):
    c = simplicial_chain_complex(fixture_strat(name).base)
    red = Reduction(c.sizes, c.boundaries, field="Q", track=True)
    for k in range(len(c.sizes)):
        for x in red.survivors(k):
            lifted = red.lift(k, {x: 1})
            assert red.project(k, lifted) == {x: 1}


def test_field_argument_checked():
    with pytest.raises(ValueError):
        Reduction([1], [[]], field="F2")
