"""Built-in stratified complexes and group actions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .complex import build_complex
from .stratification import Stratification, stratify
from .stratified import stratified_cone, stratified_suspension


class UnknownFixture(KeyError):
    pass


CIRCLE = [(0, 1), (1, 2), (0, 2)]
SPHERE = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
TORUS = sorted({tuple(sorted(((i) % 7, (i + 1) % 7, (i + 3) % 7))) for i in range(7)}
               | {tuple(sorted((i % 7, (i + 2) % 7, (i + 3) % 7))) for i in range(7)})
RP2 = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 2, 6),
       (2, 3, 5), (3, 4, 6), (2, 4, 5), (3, 5, 6), (2, 4, 6)]
OCTAHEDRON = [(a, b, c) for a in ("x+", "x-") for b in ("y+", "y-") for c in ("z+", "z-")]


def _flip(label: str) -> str:
    return label[0] + ("-" if label[1] == "+" else "+")


ANTIPODAL = {v: _flip(v) for v in ("x+", "x-", "y+", "y-", "z+", "z-")}


@dataclass
class Fixture:
    name: str
    description: str
    build: Callable[[], Stratification]
    counterexample: bool = False
    tags: tuple = ()


@dataclass
class ActionFixture:
    name: str
    description: str
    build: Callable[[], Stratification]
    generators: list = field(default_factory=list)


def _plain(facets, name):
    return lambda: stratify(build_complex(facets, name))


def _cone(facets, name):
    return lambda: stratified_cone(stratify(build_complex(facets, name)))


def _susp(facets, name):
    return lambda: stratified_suspension(stratify(build_complex(facets, name)))


def _wedge():
    # two triangles glued along an edge plus a third: a codim-1 branching, not a pseudomanifold
    return stratify(build_complex([(0, 1, 2), (0, 1, 3), (0, 1, 4)], "book"))


FIXTURES: dict[str, Fixture] = {f.name: f for f in [
    Fixture("circle", "3-vertex circle", _plain(CIRCLE, "circle"), tags=("base",)),
    Fixture("sphere", "boundary of the 3-simplex", _plain(SPHERE, "sphere"), tags=("base", "closed")),
    Fixture("torus", "7-vertex torus", _plain(TORUS, "torus"), tags=("base", "closed")),
    Fixture("rp2", "6-vertex projective plane", _plain(RP2, "rp2"), tags=("base",)),
    Fixture("octahedron", "octahedral 2-sphere", _plain(OCTAHEDRON, "octahedron"), tags=("closed",)),
    Fixture("cone-s1", "cone on the circle, apex a codim-2 point", _cone(CIRCLE, "circle"), tags=("cone",)),
    Fixture("cone-sphere", "cone on the 2-sphere", _cone(SPHERE, "sphere"), tags=("cone",)),
    Fixture("cone-t2", "cone on the torus", _cone(TORUS, "torus"), tags=("cone",)),
    Fixture("cone-rp2", "cone on the projective plane", _cone(RP2, "rp2"), tags=("cone",)),
    Fixture("sigma-s1", "suspension of the circle with marked poles", _susp(CIRCLE, "circle"),
            tags=("closed",)),
    Fixture("sigma-sphere", "suspension of the 2-sphere with marked poles", _susp(SPHERE, "sphere"),
            tags=("closed",)),
    Fixture("sigma-t2", "suspension of the torus: two codim-3 singular points", _susp(TORUS, "torus"),
            tags=("closed",)),
    Fixture("sigma-rp2", "suspension of the projective plane", _susp(RP2, "rp2")),
    Fixture("book", "three triangles on one edge (not a pseudomanifold)", _wedge, counterexample=True),
]}


def _shift(k: int, mult: int = 1) -> dict:
    return {i: (mult * i + k) % 7 for i in range(7)}


def _suspended(action: dict, swap: bool) -> dict:
    g = dict(action)
    g["north"], g["south"] = ("south", "north") if swap else ("north", "south")
    return g


ACTIONS: dict[str, ActionFixture] = {a.name: a for a in [
    ActionFixture("octahedron-antipodal", "antipodal map on the octahedron (quotient RP^2)",
                  FIXTURES["octahedron"].build, [ANTIPODAL]),
    ActionFixture("torus-z3", "order-3 rotation i -> 2i of the 7-vertex torus, three fixed points",
                  FIXTURES["torus"].build, [_shift(0, 2)]),
    ActionFixture("torus-z7", "free translation i -> i+1 of the 7-vertex torus",
                  FIXTURES["torus"].build, [_shift(1)]),
    ActionFixture("circle-rotation", "rotation by one step of the 3-vertex circle",
                  FIXTURES["circle"].build, [{0: 1, 1: 2, 2: 0}]),
    ActionFixture("sigma-t2-z3", "order-3 rotation of the torus suspended, poles fixed",
                  FIXTURES["sigma-t2"].build, [_suspended(_shift(0, 2), False)]),
    ActionFixture("sigma-octahedron-antipodal", "antipodal map suspended with the poles swapped",
                  _susp(OCTAHEDRON, "octahedron"), [_suspended(ANTIPODAL, True)]),
    ActionFixture("sigma-s1-swap", "swap of the suspension poles, circle fixed",
                  FIXTURES["sigma-s1"].build, [_suspended({0: 0, 1: 1, 2: 2}, True)]),
]}


def get_fixture(name: str) -> Stratification:
    try:
        return FIXTURES[name].build()
    except KeyError:
        raise UnknownFixture(f"unknown fixture {name!r}; try 'fixtures list'") from None


def get_action(name: str) -> ActionFixture:
    try:
        return ACTIONS[name]
    except KeyError:
        raise UnknownFixture(f"unknown action {name!r}") from None
