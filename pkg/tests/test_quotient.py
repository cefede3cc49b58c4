from __future__ import annotations

import pytest

from stratih.fixtures import ACTIONS, get_fixture
from stratih.ih import homology, intersection_chain_complex
from stratih.linalg import matmul
from stratih.perversity import from_spec, zero_perversity
from stratih.quotient import (GroupTooLarge, NotRegular, NotSimplicial, PerversityNotInvariant,
                              SimplicialAction, invariant_ih, is_regular, quotient, regularize,
                              transport_to_quotient, validate_action)


def action(name, **kw):
    fx = ACTIONS[name]
    return SimplicialAction.from_labels(fx.build(), fx.generators, **kw)


@pytest.mark.parametrize("name, order, orbits", [
    ("octahedron-antipodal", 2, 3),
    ("torus-z3", 3, 3),
    ("torus-z7", 7, 1),
    ("circle-rotation", 3, 1),
    ("sigma-s1-swap", 2, 4),
])
def test_group_order_and_orbits(name, order, orbits):
    a = action(name)
    assert a.order == order
    assert len(a.orbits()) == orbits
    assert sorted(v for o in a.orbits() for v in o) == list(range(len(a.base.vertices)))


def test_regularity_report():
    r = validate_action(action("torus-z3"))
    status = {x.name: x.passed for x in r.results}
    assert status["simplicial"] and status["filtration"]
    assert not status["orbit-separation"]
    assert is_regular(action("sigma-s1-swap"))


@pytest.mark.parametrize("name, times", [("octahedron-antipodal", 1), ("torus-z3", 2),
                                         ("sigma-s1-swap", 0)])
def test_regularize_counts_subdivisions(name, times):
    b = regularize(action(name))
    assert b.subdivisions == times
    assert is_regular(b)


def test_quotient_requires_regular_action():
    with pytest.raises(NotRegular):
        quotient(action("octahedron-antipodal"))


def test_group_too_large():
    with pytest.raises(GroupTooLarge):
        action("torus-z7", max_order=5)


def test_non_bijective_generator():
    st = get_fixture("circle")
    with pytest.raises(NotSimplicial):
        SimplicialAction.from_labels(st, [{0: 1, 1: 1, 2: 2}])
    with pytest.raises(NotSimplicial):
        SimplicialAction.from_labels(st, [{0: 9}])


def test_antipodal_quotient_is_projective_plane():
    q = quotient(regularize(action("octahedron-antipodal")))
    assert q.complex.f_vector() == (13, 36, 24)
    h = homology(intersection_chain_complex(zero_perversity(q.strat)))
    assert h.groups() == ["Z", "Z/2", "0"]


def test_invariant_projector_is_idempotent():
    a = regularize(action("octahedron-antipodal"))
    inv = invariant_ih(a)
    assert inv.idempotent
    assert inv.full_ranks == [1, 0, 1] and inv.ranks == [1, 0, 0]
    for P in inv.projectors:
        assert matmul(P, P) == P


def test_rotation_of_circle_fixes_homology():
    inv = invariant_ih(regularize(action("circle-rotation")))
    assert inv.ranks == inv.full_ranks == [1, 1]


def test_unequal_pole_values_not_invariant():
    a = action("sigma-octahedron-antipodal")
    p = from_spec(a.strat, {"@north": 0, "@south": 1})
    with pytest.raises(PerversityNotInvariant):
        invariant_ih(a, p)


def test_transport_to_quotient_rejects_unequal_values():
    a = regularize(action("sigma-octahedron-antipodal"))
    q = quotient(a)
    p = from_spec(action("sigma-octahedron-antipodal").strat, {"@north": 0, "@south": 1}).on(a.strat)
    with pytest.raises(PerversityNotInvariant):
        transport_to_quotient(p, q.strat, q)


def test_action_must_preserve_filtration():
    st = get_fixture("sigma-s1")
    # moves a pole onto a regular vertex
    a = SimplicialAction.from_labels(st, [{"north": 0, 0: "north"}])
    r = validate_action(a)
    status = {x.name: x.passed for x in r.results}
    assert not status.get("filtration", False)
