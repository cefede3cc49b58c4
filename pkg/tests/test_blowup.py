from __future__ import annotations

from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from stratih.blowup import (DecomposedSimplex, NotFiltered, ZeroDepth, all_flags, blow_up,
                            boundary_faces, check_map, decompose_from_filtration, decompositions,
                            full_flags, ordered_partitions, subdivision_compatibility)
from stratih.rational import Rational


def fubini(n: int) -> int:
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(comb(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


@pytest.mark.parametrize("d", range(1, 6))
def test_decomposition_counts(d):
    # ordered partitions of d+1 vertices, minus the single block
    assert sum(1 for _ in decompositions(d)) == fubini(d + 1) - 1


def test_total_decompositions_up_to_five():
    assert sum(1 for d in range(1, 6) for _ in decompositions(d)) == 5310
    assert [len(list(ordered_partitions(range(n)))) for n in range(5)] == [1, 1, 3, 13, 75]


def test_decomposed_simplex_validation():
    d = DecomposedSimplex(((0,), (1, 2)))
    assert (d.depth, d.dim, d.vertices) == (1, 2, (0, 1, 2))
    with pytest.raises(ValueError):
        DecomposedSimplex(((0,), ()))
    with pytest.raises(ValueError):
        DecomposedSimplex(((0, 1), (1,)))
    with pytest.raises(ZeroDepth):
        blow_up(DecomposedSimplex(((0, 1, 2),)))


def test_decompose_from_filtration(fixture_strat):
    st = fixture_strat("cone-s1")
    d = decompose_from_filtration(["apex", 0, 1], st)
    assert d.blocks == (("apex",), (0, 1))
    assert decompose_from_filtration([0, 1], st).blocks == ((0, 1),)
    with pytest.raises(NotFiltered):
        decompose_from_filtration(["apex"], st)


def test_decompose_needs_subdivision(fixture_strat):
    st = fixture_strat("sigma-t2")
    north = st.base.vertex_index("north")
    sigma = next(s for s in st.base.simplices(3) if north in s)
    d = decompose_from_filtration(sigma, st)
    assert d.blocks[0] == ("north",) and d.depth == 1


@pytest.mark.parametrize("d", range(1, 5))
def test_boundary_formula(d):
    for dec in decompositions(d):
        b = blow_up(dec)
        r = boundary_faces(b, samples=4)
        assert r.holds, dec.blocks
        n_blu, n_target = r.counts
        if len(dec.vertices) - len(dec.blocks[0]) == 1:
            # one join vertex: the collapsed face is itself the blow-up of a facet
            assert r.collapsed_is_t1 and n_blu == n_target
        else:
            assert n_blu == n_target + 1


@pytest.mark.parametrize("prism", [(("p0", "p1"),), (("p0", "p1"), ("q0", "q1", "q2"))])
def test_boundary_formula_with_prism(prism):
    for dec in decompositions(2):
        r = boundary_faces(blow_up(dec, prism), samples=3)
        assert r.holds


def test_linear_map_on_an_edge():
    b = blow_up(DecomposedSimplex(((0,), (1,))))
    half = Rational(1, 2)
    x, w = b.L(((), {0: half}, {1: Rational(1)}))
    assert w == {0: half, 1: half}
    # the collapsed face goes to the vertex of D_0
    assert b.L(((), {0: Rational(1)}, {1: Rational(1)}))[1] == {0: 1}
    assert b.remaining.blocks == ((1,),)


@pytest.mark.parametrize("blocks", [((0,), (1,)), ((0,), (1, 2)), ((0, 1), (2,), (3,)),
                                    ((0, 2), (1, 3, 4))])
def test_map_checks(blocks):
    m = check_map(blow_up(DecomposedSimplex(blocks), (("p0", "p1"),)), samples=8)
    assert m.ok
    if len(blocks) == 2 and len(blocks[1]) == 1:
        assert m.bijective_closed
    elif len(blocks[1]) + sum(len(b) for b in blocks[2:]) >= 2:
        assert m.collapse_witness is not None


@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_images_lie_in_the_simplex(data):
    d = data.draw(st.integers(1, 4))
    decs = list(decompositions(d))
    dec = decs[data.draw(st.integers(0, len(decs) - 1))]
    b = blow_up(dec)
    import random
    rng = random.Random(data.draw(st.integers(0, 10 ** 6)))
    p = b.cell.sample(rng, boundary=data.draw(st.booleans()))
    _, w = b.L(p)
    assert all(v > 0 for v in w.values())
    assert sum(w.values()) == 1
    assert set(w) <= set(dec.vertices)


def test_flags():
    assert len(list(full_flags(range(3)))) == 6
    # chains of nonempty faces of a triangle: ordered set partitions of prefixes
    assert len(list(all_flags(range(3)))) == 7 + 12 + 6


@pytest.mark.parametrize("blocks", [((0,), (1, 2)), ((0, 1), (2,)), ((0,), (1,), (2,))])
def test_subdivision_compatibility(blocks):
    dec = DecomposedSimplex(blocks)
    for flag in full_flags(dec.vertices):
        w = subdivision_compatibility(dec, flag, samples=6)
        assert w.commutes and w.regular_parts_agree


def test_subdivision_flag_must_increase():
    with pytest.raises(ValueError):
        subdivision_compatibility(DecomposedSimplex(((0,), (1,))), [(0, 1), (0,)])
