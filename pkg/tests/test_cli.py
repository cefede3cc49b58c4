from __future__ import annotations

import json

import pytest

from stratih.cli import run


@pytest.fixture
def cli(capsys):
    def invoke(*args):
        code = run(list(args))
        out, err = capsys.readouterr()
        return code, out, err
    return invoke


def test_fixtures_list(cli):
    code, out, _ = cli("fixtures", "list", "--json")
    doc = json.loads(out)
    assert code == 0
    assert "sigma-t2" in doc["complexes"] and "octahedron-antipodal" in doc["actions"]


@pytest.mark.parametrize("name, code", [("cone-s1", 0), ("book", 1)])
def test_validate_exit_codes(cli, name, code):
    rc, out, _ = cli("validate", "-f", name)
    assert rc == code
    assert out.rstrip().endswith("PASS" if code == 0 else "FAIL")


def test_compute_json(cli):
    code, out, _ = cli("compute", "-f", "cone-rp2", "-s", "1", "--json")
    doc = json.loads(out)
    assert code == 0
    assert [d["torsion"] for d in doc["degrees"]] == [[], [2], [], []]


def test_compute_mixed_perversity(cli):
    code, out, _ = cli("compute", "-f", "sigma-t2", "-s", "1", "-c", "Q",
                       "-p", '{"@north": 0, "@south": 1}')
    assert code == 0
    assert out.splitlines()[-1] == "groups: (Q, 0, 0, Q)"


def test_compute_from_file(cli, tmp_path):
    _, doc, _ = cli("construct", "cone", "-f", "circle")
    path = tmp_path / "cone.json"
    path.write_text(doc)
    code, out, _ = cli("compute", str(path), "-p", "top", "-s", "1")
    assert code == 0 and out.splitlines()[-1] == "groups: (Z, 0, 0)"


def test_construct_quotient(cli, tmp_path):
    out_path = tmp_path / "rp2.json"
    code, _, _ = cli("construct", "quotient", "-f", "octahedron", "--action", "antipodal",
                     "-o", str(out_path))
    assert code == 0
    code, out, _ = cli("compute", str(out_path), "-s", "0")
    assert out.splitlines()[-1] == "groups: (Z, Z/2, 0)"


def test_parse_error_position(cli, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"facets": [[0, 1]\n  "x": 1}')
    code, _, err = cli("validate", str(bad))
    assert code == 2
    assert f"{bad}:2:3:" in err


@pytest.mark.parametrize("args", [
    ("compute", "-f", "no-such-fixture"),
    ("compute", "-f", "sigma-t2", "-p", '{"@north": 0}'),
    ("compute",),
    ("bogus",),
])
def test_usage_errors(cli, args):
    code, _, _ = cli(*args)
    assert code == 2


def test_bad_thread_count(cli, monkeypatch):
    monkeypatch.setenv("STRATIH_THREADS", "many")
    code, _, err = cli("fixtures", "list")
    assert code == 2 and "STRATIH_THREADS" in err


def test_verify_suite(cli):
    code, out, _ = cli("verify", "mv", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] == doc["total"]


def test_repeated_output_is_identical(cli):
    runs = [cli("compute", "-f", "sigma-rp2", "-s", "1", "--json") for _ in range(2)]
    assert runs[0] == runs[1]
