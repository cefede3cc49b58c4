from __future__ import annotations

import json

import pytest

from stratih.perversity import constant, from_spec, lower_middle, top_perversity, zero_perversity
from stratih.verify import (NotACover, NotOrientable, OutOfGMRange, TheoremReport,
                            check_cone_formula, check_duality, check_extremes,
                            check_mayer_vietoris, check_monotone, check_product_invariance,
                            check_small_chain_subdivision, cone_cut, ih, mv_covers, render,
                            truncate)


@pytest.mark.parametrize("link_dim, a, cut", [(1, 0, 1), (2, 0, 2), (2, 1, 1), (0, 0, 0)])
def test_cone_cut(link_dim, a, cut):
    assert cone_cut(link_dim, a) == cut


def test_truncate_drops_torsion_above_cut(fixture_strat):
    h = ih(zero_perversity(fixture_strat("rp2")), 1)
    assert truncate(h, 2, 4).groups() == ["Z", "Z/2", "0", "0"]
    assert truncate(h, 1, 4).groups() == ["Z", "0", "0", "0"]


@pytest.mark.parametrize("a, groups", [(0, ["Z", "Z/2", "0", "0"]), (1, ["Z", "0", "0", "0"])])
def test_cone_on_rp2(fixture_strat, a, groups):
    r = check_cone_formula(fixture_strat("rp2"), a, subdivisions=1)
    assert r.passed and r.computed == groups


def test_cone_formula_range(fixture_strat):
    with pytest.raises(OutOfGMRange):
        check_cone_formula(fixture_strat("circle"), 1)


def test_product_on_cone(fixture_strat):
    r = check_product_invariance(top_perversity(fixture_strat("cone-s1")))
    assert r.passed and r.note.endswith("yyy")


def test_mayer_vietoris_on_circle():
    name, st, U, V = mv_covers()[0]
    r = check_mayer_vietoris(zero_perversity(st), U, V, 1, name=name)
    assert r.passed


def test_mayer_vietoris_needs_a_cover(fixture_strat):
    st = fixture_strat("circle")
    with pytest.raises(NotACover):
        check_mayer_vietoris(zero_perversity(st), [(0, 1)], [(1, 2)], 1)


def test_duality_on_sphere_and_failures(fixture_strat):
    assert check_duality(zero_perversity(fixture_strat("sphere")), 1).passed
    with pytest.raises(NotOrientable):
        check_duality(zero_perversity(fixture_strat("rp2")), 1)
    with pytest.raises(NotOrientable):
        check_duality(zero_perversity(fixture_strat("book")), 1)
    with pytest.raises(OutOfGMRange):
        check_duality(constant(fixture_strat("sigma-s1"), -1), 1)


def test_mixed_duality_on_sigma_t2(fixture_strat):
    st = fixture_strat("sigma-t2")
    r = check_duality(from_spec(st, {"@north": 0, "@south": 1}), 1)
    assert r.passed and r.expected == [1, 0, 0, 1]


def test_subdivision_on_small_fixtures(fixture_strat):
    for name in ("cone-s1", "rp2"):
        assert check_small_chain_subdivision(zero_perversity(fixture_strat(name)), 1).passed


def test_monotone_and_extremes(fixture_strat):
    st = fixture_strat("cone-t2", 1)
    assert check_monotone(zero_perversity(st), lower_middle(st)).passed
    with pytest.raises(ValueError):
        check_monotone(top_perversity(st), zero_perversity(st))
    assert check_extremes(fixture_strat("cone-rp2")).passed


def test_report_json_and_render():
    reports = [TheoremReport("cone", "circle", "apex=0", ["Z", "0"], ["Z", "0"], True, 0.5),
               TheoremReport("cone", "torus", "apex=1", ["Z"], ["Z^2"], False, 0.1, "x")]
    doc = reports[1].to_json()
    assert doc["verdict"] == "FAIL" and "runtime" not in doc
    json.dumps(doc)
    text = render(reports)
    assert text == render(reports)
    assert text.splitlines()[-1] == "1/2 checks passed"
    assert "0.50s" in render(reports, timings=True) and "0.50s" not in text
