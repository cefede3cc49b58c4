"""JSON interchange for complexes, filtrations, perversities and actions."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .complex import ComplexError, SimplicialComplex, render_label
from .fixtures import ACTIONS, FIXTURES, UnknownFixture, get_fixture
from .perversity import Perversity, from_spec
from .quotient import SimplicialAction
from .stratification import Filtration, Stratification, derive_strata


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = ""):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:" if source else ""
        if line:
            where += f"{line}:{column}: "
        elif where:
            where += " "
        super().__init__(where + message)


def parse_json(text: str, source: str = "") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno, source) from None


def read_json(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", source=str(p)) from None
    return parse_json(text, str(p))


def dumps(obj: Any) -> str:
    """Indented JSON with lists of scalars kept on one line."""
    return _dump(obj, 0) + "\n"


def _dump(obj: Any, depth: int) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(x, (dict, list, tuple)) for x in obj):
            return json.dumps(list(obj))
        return "[\n" + ",\n".join(inner + _dump(x, depth + 1) for x in obj) + "\n" + pad + "]"
    return json.dumps(obj)


def _facets(doc: Any, source: str) -> list:
    facets = doc.get("facets") if isinstance(doc, dict) else None
    if not isinstance(facets, list) or not all(isinstance(f, list) for f in facets):
        raise ParseError("expected an object with a 'facets' list of label lists", source=source)
    for f in facets:
        for v in f:
            if not isinstance(v, (str, int)) or isinstance(v, bool):
                raise ParseError(f"vertex labels must be strings, got {v!r}", source=source)
    return facets


def complex_from_json(doc: Any, source: str = "") -> SimplicialComplex:
    facets = _facets(doc, source)
    try:
        return SimplicialComplex.from_json({"name": doc.get("name", ""), "facets": facets})
    except ComplexError as exc:
        raise ParseError(str(exc), source=source) from None


def stratification_from_json(doc: Any, source: str = "") -> Stratification:
    """Accepts a filtration document or a bare complex (trivial filtration)."""
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object", source=source)
    if "complex" in doc:
        X = complex_from_json(doc["complex"], source)
        skeleta = doc.get("skeleta", {})
        if not isinstance(skeleta, dict):
            raise ParseError("'skeleta' must be an object", source=source)
        try:
            sk = {int(k): [[str(v) for v in f] for f in fs] for k, fs in skeleta.items()}
        except (ValueError, TypeError):
            raise ParseError("skeleta keys must be integers and values lists of label lists",
                             source=source) from None
        top = doc.get("dim")
        try:
            f = Filtration.from_skeleta(X, sk, top=top)
        except ComplexError as exc:
            raise ParseError(str(exc), source=source) from None
        return derive_strata(f)
    return derive_strata(Filtration.trivial(complex_from_json(doc, source)))


def stratification_to_json(st: Stratification) -> dict:
    out = st.filtration.to_json()
    if st.filtration.top != st.base.dim:
        out["dim"] = st.filtration.top
    return out


def load_stratification(path: str | None = None, fixture: str | None = None) -> Stratification:
    if fixture is not None:
        return get_fixture(fixture)
    if path is None:
        raise ParseError("no input given; pass a JSON path or --fixture")
    return stratification_from_json(read_json(path), str(path))


def perversity_from_text(st: Stratification, text: str) -> Perversity:
    """A named perversity, an inline JSON object, or a path to a JSON file."""
    if text.lstrip().startswith("{"):
        spec = parse_json(text, "--perversity")
    elif Path(text).suffix == ".json":
        spec = read_json(text)
    else:
        spec = text
    if not isinstance(spec, (str, dict)):
        raise ParseError("perversity must be a name or an object of stratum values")
    try:
        return from_spec(st, spec)
    except (KeyError, ValueError) as exc:
        raise ParseError(str(exc.args[0] if exc.args else exc), source="--perversity") from None


def _relabel(st: Stratification, gen: dict, source: str) -> dict:
    rendered = {render_label(v): v for v in st.base.vertices}
    out = {}
    for a, b in gen.items():
        if str(a) not in rendered or str(b) not in rendered:
            raise ParseError(f"generator mentions an unknown vertex ({a!r} -> {b!r})", source=source)
        out[rendered[str(a)]] = rendered[str(b)]
    return out


def action_from_json(doc: Any, source: str = "") -> SimplicialAction:
    if not isinstance(doc, dict) or "generators" not in doc or "complex" not in doc:
        raise ParseError("expected an object with 'complex' and 'generators'", source=source)
    ref = doc["complex"]
    if isinstance(ref, str):
        st = get_fixture(ref) if ref in FIXTURES else stratification_from_json(read_json(ref), ref)
    else:
        st = stratification_from_json(ref, source)
    gens = doc["generators"]
    if not isinstance(gens, list) or not all(isinstance(g, dict) for g in gens):
        raise ParseError("'generators' must be a list of label maps", source=source)
    return SimplicialAction.from_labels(st, [_relabel(st, g, source) for g in gens])


def action_to_json(name: str) -> dict:
    af = ACTIONS[name]
    st = af.build()
    return {"complex": stratification_to_json(st),
            "generators": [{render_label(a): render_label(b) for a, b in g.items()}
                           for g in af.generators]}


def load_action(ref: str, fixture: str | None = None) -> SimplicialAction:
    """A built-in action name (optionally relative to a fixture) or an action JSON file."""
    for name in ([f"{fixture}-{ref}"] if fixture else []) + [ref]:
        if name in ACTIONS:
            af = ACTIONS[name]
            return SimplicialAction.from_labels(af.build(), af.generators)
    if Path(ref).suffix == ".json":
        return action_from_json(read_json(ref), ref)
    raise UnknownFixture(f"unknown action {ref!r}")
