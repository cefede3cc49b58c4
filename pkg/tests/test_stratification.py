from __future__ import annotations

import pytest

from stratih.complex import SimplicialComplex
from stratih.stratification import (Filtration, InvalidFiltration, NotSubcomplex, derive_strata,
                                    restrict, stratify, stratum_link, validate_pseudomanifold)
from stratih.stratified import stratified_cone, stratified_product, stratified_suspension

from conftest import PSEUDOMANIFOLDS


@pytest.mark.parametrize("name", PSEUDOMANIFOLDS)
def test_fixtures_are_pseudomanifolds(fixture_strat, name):
    report = validate_pseudomanifold(fixture_strat(name))
    assert report.ok, report.table()


def test_book_fails_branch(fixture_strat):
    report = validate_pseudomanifold(fixture_strat("book"))
    assert not report.ok
    assert not report["branch"].passed
    assert report["branch"].witnesses == [["0", "1"]]


@pytest.fixture
def square():
    return SimplicialComplex.from_facets([("a", "b", "c"), ("a", "c", "d")], "square")


def test_codim_one_stratum_rejected(square):
    st = stratify(square, {1: [("a", "c")]})
    report = validate_pseudomanifold(st)
    assert not report["codimension"].passed
    assert "FAIL" in report.table()


@pytest.mark.parametrize("skeleta, message", [
    ({1: [("a", "b", "c")]}, "dimension > 1"),
    ({0: [("a",)], 1: [("b", "c")]}, "not contained"),
    ({0: [("z",)]}, "not a subcomplex"),
])
def test_invalid_filtrations(square, skeleta, message):
    with pytest.raises(InvalidFiltration, match=message):
        stratify(square, skeleta)


def test_sigma_t2_strata(fixture_strat):
    st = fixture_strat("sigma-t2")
    assert [(s.id, s.dim) for s in st.strata] == [("S0_0", 0), ("S0_1", 0), ("S3_0", 3)]
    assert [st.codim(i) for i in st.singular] == [3, 3]
    assert st.depth() == 1
    assert st.touches[2] == frozenset({0, 1, 2})
    assert st.strata[st.stratum_containing(["north"])].id == "S0_0"


@pytest.mark.parametrize("name, depth, singular", [
    ("sphere", 0, 0),
    ("cone-s1", 1, 1),
    ("cone-rp2", 1, 1),
    ("sigma-t2", 1, 2),
])
def test_depth_and_singular_count(fixture_strat, name, depth, singular):
    st = fixture_strat(name)
    assert st.depth() == depth
    assert len(st.singular) == singular


def test_iterated_cone_has_depth_two(fixture_strat):
    st = stratified_cone(fixture_strat("cone-s1"), apex="top")
    assert st.depth() == 2
    assert validate_pseudomanifold(st).ok
    assert sorted(st.codim(i) for i in st.singular) == [2, 3]


def test_suspension_and_product_levels(fixture_strat):
    susp = stratified_suspension(fixture_strat("circle"))
    assert [susp.codim(i) for i in susp.singular] == [2, 2]
    prod = stratified_product(fixture_strat("cone-s1"))
    st = prod.strat
    assert st.n == 3
    assert [st.strata[i].dim for i in st.singular] == [1]
    assert validate_pseudomanifold(st).ok


def test_link_of_pole_is_torus(fixture_strat):
    st = fixture_strat("sigma-t2")
    L = stratum_link(st, st.base.simplex(["north"]))
    assert L.base.f_vector() == (7, 21, 14)
    assert not L.singular


def test_restrict_keeps_parent_strata(fixture_strat):
    st = fixture_strat("sigma-t2")
    north = st.base.vertex_index("north")
    new, parent = restrict(st, [s for s in st.base.all_simplices() if north not in s])
    assert [(s.id, s.dim) for s in new.strata] == [("S0_0", 0), ("S3_0", 3)]
    assert parent == {0: 1, 1: 2}
    with pytest.raises(NotSubcomplex):
        restrict(st, [st.base.simplices(1)[0]])


@pytest.mark.parametrize("name", ["cone-s1", "sigma-t2", "cone-rp2"])
def test_subdivision_preserves_strata(fixture_strat, name):
    st, sd = fixture_strat(name), fixture_strat(name, 1)
    assert [(s.id, s.dim) for s in st.strata] == [(s.id, s.dim) for s in sd.strata]
    assert validate_pseudomanifold(sd).ok


def test_filtration_json_round_trip(fixture_strat):
    st = fixture_strat("cone-s1")
    doc = st.filtration.to_json()
    assert doc["skeleta"] == {"0": [["apex"]], "1": [["apex"]]}
    X = SimplicialComplex.from_json(doc["complex"])
    again = derive_strata(Filtration.from_skeleta(X, {int(k): v for k, v in doc["skeleta"].items()}))
    assert again.filtration.to_json() == doc
