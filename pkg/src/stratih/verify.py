"""Machine checks of the structural statements on fixtures.

Every check computes two sides independently and compares exact integer
data.  The homological form of the cone formula is pinned by
:func:`cone_cut`; nothing else in the package restates it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import blowup as bl
from .complex import SimplicialComplex
from .fixtures import ACTIONS, FIXTURES, get_fixture
from .ih import (HomologyResult, NotAllowable, homology, induced_map, intersection_chain_complex,
                 is_isomorphism, simplicial_chain_complex)
from .linalg import matmul, rank
from .perversity import (Perversity, constant, dual, from_spec, lower_middle, top_perversity,
                         transport_cone, transport_product, transport_restrict, upper_middle,
                         zero_perversity)
from .quotient import (SimplicialAction, invariant_ih, quotient, regularize,
                       transport_to_quotient)
from .stratification import Stratification, restrict, validate_pseudomanifold
from .stratified import stratified_cone, stratified_product, subdivide, subdivided

DEFAULT_SUBDIVISIONS = 2


class OutOfGMRange(ValueError):
    pass


class NotACover(ValueError):
    pass


class NotOrientable(ValueError):
    pass


def cone_cut(link_dim: int, apex_value: int) -> int:
    """Homological cone formula: IH_i(cX) = IH_i(X) for i < cut, and 0 for i >= cut."""
    return link_dim - apex_value


@dataclass
class TheoremReport:
    theorem: str
    fixture: str
    perversity: str
    expected: list
    computed: list
    passed: bool
    runtime: float = 0.0
    note: str = ""

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "fixture": self.fixture, "perversity": self.perversity,
                "expected": self.expected, "computed": self.computed,
                "verdict": "PASS" if self.passed else "FAIL", "note": self.note}


def _timed(fn: Callable[..., TheoremReport]) -> Callable[..., TheoremReport]:
    def wrapper(*args, **kwargs):
        t = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.runtime = time.perf_counter() - t
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _pname(p: Perversity) -> str:
    j = p.to_json()
    return j if isinstance(j, str) else ",".join(f"{k}={v}" for k, v in sorted(j.items()))


def ih(p: Perversity, subdivisions: int = DEFAULT_SUBDIVISIONS, coefficients: str = "Z") -> HomologyResult:
    return homology(intersection_chain_complex(p.on(subdivided(p.strat, subdivisions))), coefficients)


def truncate(h: HomologyResult, cut: int, length: int) -> HomologyResult:
    betti = [h.betti[i] if i < cut and i < len(h.betti) else 0 for i in range(length)]
    torsion = [list(h.torsion[i]) if i < cut and i < len(h.torsion) else [] for i in range(length)]
    return HomologyResult(betti, torsion, h.coefficients)


# -- cone formula ---------------------------------------------------------------------------


@_timed
def check_cone_formula(X: Stratification, apex_value: int, p_link: Perversity | None = None,
                       subdivisions: int = DEFAULT_SUBDIVISIONS, name: str = "") -> TheoremReport:
    p_link = p_link or zero_perversity(X)
    codim = X.n + 1
    if not 0 <= apex_value <= codim - 2:
        raise OutOfGMRange(f"apex value {apex_value} outside 0..{codim - 2}")
    cone = stratified_cone(X)
    p_cone = transport_cone(p_link, cone, "apex", apex_value)
    cone_side = ih(p_cone, subdivisions)
    base = ih(p_link, subdivisions)
    expected = truncate(base, cone_cut(X.n, apex_value), X.n + 2)
    return TheoremReport("cone", name or X.base.name, f"apex={apex_value}", expected.groups(),
                         cone_side.groups(), expected.key() == cone_side.key(),
                         note=f"cut at degree {cone_cut(X.n, apex_value)}")


# -- product invariance -----------------------------------------------------------------------


@_timed
def check_product_invariance(p: Perversity, subdivisions: int = 1, name: str = "") -> TheoremReport:
    st = subdivided(p.strat, subdivisions)
    p = p.on(st)
    sp = stratified_product(st)
    q = transport_product(p, sp.strat)
    cx = intersection_chain_complex(p)
    cp = intersection_chain_complex(q)
    hx, hp = homology(cx, "Z"), homology(cp, "Z")
    iso = []
    for k in range(cx.top + 1):
        M = induced_map(sp.product.projection, cp, cx, k, checked=k > 0)
        iso.append(is_isomorphism(M, cx.homology_basis.rank(k), cp.homology_basis.rank(k)))
    computed = hp.groups()[: len(hx.betti)]
    ok = all(iso) and hp.key()[0][: len(hx.betti)] == hx.key()[0] and \
        hp.key()[1][: len(hx.torsion)] == hx.key()[1] and not any(hp.betti[len(hx.betti):])
    return TheoremReport("product", name or p.strat.base.name, _pname(p), hx.groups(), computed, ok,
                         note="projection iso in degrees " + "".join("y" if b else "n" for b in iso))


# -- Mayer-Vietoris ----------------------------------------------------------------------------


def _subdivided_cover(st: Stratification, times: int, U: set) -> tuple[Stratification, set]:
    """Subdivide ``times`` times, carrying the subcomplex U along by carriers."""
    for _ in range(times):
        st, sd = subdivide(st)
        inside = {v for v, c in enumerate(sd.carrier) if c in U}
        U = {s for s in st.base.all_simplices() if all(v in inside for v in s)}
    return st, U


def _closure_of_facets(X: SimplicialComplex, facets: Iterable) -> set:
    return X.closure(X.simplex(f) for f in facets)


@_timed
def check_mayer_vietoris(p: Perversity, U_facets: Sequence, V_facets: Sequence,
                         subdivisions: int = 1, name: str = "") -> TheoremReport:
    st = p.strat
    X = st.base
    U = _closure_of_facets(X, U_facets)
    V = _closure_of_facets(X, V_facets)
    if U | V != set(X.all_simplices()):
        raise NotACover("U and V do not cover the complex")
    sub, Us = _subdivided_cover(st, subdivisions, U)
    _, Vs = _subdivided_cover(st, subdivisions, V)
    ps = p.on(sub)
    pieces = {}
    for key, simp in (("UV", Us & Vs), ("U", Us), ("V", Vs)):
        rs, parent = restrict(sub, simp)
        pieces[key] = intersection_chain_complex(transport_restrict(ps, rs, parent))
    cx = intersection_chain_complex(ps)
    # chain level: allowability is decided locally, so the intersection chains agree on overlaps
    local = True
    Y = sub.base
    for key, c in pieces.items():
        Z = c.base
        for k in range(Z.dim + 1):
            for i, s in enumerate(Z.simplices(k)):
                if bool(c.allow[k][i]) != bool(cx.allow[k][Y.position(Y.simplex(Z.labels(s)))]):
                    local = False
    ident = {v: v for v in Y.vertices}
    top = cx.top
    h = {k: c.homology_basis for k, c in pieces.items()}
    hx = cx.homology_basis
    exact = True
    ranks_i, ranks_j = [], []
    for k in range(top + 1):
        a = h["UV"].rank(k) if k <= pieces["UV"].top else 0
        bu = h["U"].rank(k) if k <= pieces["U"].top else 0
        bv = h["V"].rank(k) if k <= pieces["V"].top else 0
        iu = induced_map(ident, pieces["UV"], pieces["U"], k) if a and bu else [[0] * a for _ in range(bu)]
        iv = induced_map(ident, pieces["UV"], pieces["V"], k) if a and bv else [[0] * a for _ in range(bv)]
        i_mat = iu + [[-x for x in row] for row in iv]
        ju = induced_map(ident, pieces["U"], cx, k) if bu and hx.rank(k) else [[0] * bu for _ in range(hx.rank(k))]
        jv = induced_map(ident, pieces["V"], cx, k) if bv and hx.rank(k) else [[0] * bv for _ in range(hx.rank(k))]
        j_mat = [ru + rv for ru, rv in zip(ju, jv)]
        ri = rank(i_mat) if i_mat and a else 0
        rj = rank(j_mat) if j_mat and (bu + bv) else 0
        if a and (bu + bv) and hx.rank(k):
            if any(any(x for x in row) for row in matmul(j_mat, i_mat)):
                exact = False
        if (bu + bv) - rj != ri:
            exact = False
        ranks_i.append((a, ri))
        ranks_j.append((bu + bv, rj, hx.rank(k)))
    # exactness at IH_k(X) and IH_{k-1}(U n V) through the connecting map
    for k in range(1, top + 1):
        if ranks_j[k][2] - ranks_j[k][1] != ranks_i[k - 1][0] - ranks_i[k - 1][1]:
            exact = False
    if ranks_j[0][2] - ranks_j[0][1] != 0:
        exact = False
    euler = sum((-1) ** k * (ranks_i[k][0] - ranks_j[k][0] + ranks_j[k][2]) for k in range(top + 1))
    computed = [f"{ranks_i[k][0]}->{ranks_j[k][0]}->{ranks_j[k][2]}" for k in range(top + 1)]
    ok = exact and euler == 0 and local
    note = f"rank i={[r for _, r in ranks_i]} rank j={[r[1] for r in ranks_j]}"
    if not local:
        note += "; allowability differs on a piece of the cover"
    return TheoremReport("mayer-vietoris", name or X.name, _pname(p), ["exact"] * (top + 1),
                         computed if not ok else ["exact"] * (top + 1), ok, note=note)


# -- duality ----------------------------------------------------------------------------------


def orientable(st: Stratification) -> bool:
    h = homology(simplicial_chain_complex(st.base), "Z")
    return h.betti[st.n] == 1 and len(st.base.components()) == 1


@_timed
def check_duality(p: Perversity, subdivisions: int = DEFAULT_SUBDIVISIONS, name: str = "") -> TheoremReport:
    st = p.strat
    if not validate_pseudomanifold(st).ok:
        raise NotOrientable(f"{st.base.name}: not a stratified pseudomanifold")
    if not orientable(st):
        raise NotOrientable(f"{st.base.name}: top integer homology is not Z")
    if not p.in_gm_range():
        raise OutOfGMRange("duality is checked for perversities in the GM range")
    q = dual(p)
    hp = ih(p, subdivisions, "Q")
    hq = ih(q, subdivisions, "Q")
    n = st.n
    flipped = [hq.betti[n - i] for i in range(n + 1)]
    return TheoremReport("duality", name or st.base.name, f"{_pname(p)} / {_pname(q)}",
                         hp.betti, flipped, hp.betti == flipped,
                         note="ranks over Q, IH side only")


# -- subdivision stability -------------------------------------------------------------------------


@_timed
def check_small_chain_subdivision(p: Perversity, subdivisions: int = DEFAULT_SUBDIVISIONS,
                                  name: str = "", coarse: Stratification | None = None,
                                  fine: Stratification | None = None) -> TheoremReport:
    """IH after ``subdivisions`` and after one more; ``coarse``/``fine`` may be passed
    in when several perversities share the same subdivided complexes."""
    coarse = coarse or subdivided(p.strat, subdivisions)
    fine = fine or subdivided(coarse, 1)
    before = homology(intersection_chain_complex(p.on(coarse)), "Z")
    after = homology(intersection_chain_complex(p.on(fine)), "Z")
    return TheoremReport("subdivision", name or p.strat.base.name, _pname(p), before.groups(),
                         after.groups(), before.key() == after.key(),
                         note=f"{subdivisions} vs {subdivisions + 1} subdivisions")


# -- monotonicity and extremes ----------------------------------------------------------------


@_timed
def check_monotone(p: Perversity, p2: Perversity, name: str = "") -> TheoremReport:
    """p <= p2 implies A^p in A^p2 and IC^p in IC^p2 (every basis chain expressible)."""
    if not p <= p2:
        raise ValueError("monotonicity needs p <= p2 pointwise")
    c1 = intersection_chain_complex(p)
    c2 = intersection_chain_complex(p2)
    allow_ok = all(not a or b for k in range(c1.top + 1) for a, b in zip(c1.allow[k], c2.allow[k]))
    ic_ok = True
    try:
        for k in range(c1.top + 1):
            for i in range(c1.sizes[k]):
                c2.coordinates(k, c1.chain(k, i))
    except NotAllowable:
        ic_ok = False
    return TheoremReport("monotone", name or p.strat.base.name, f"{_pname(p)} <= {_pname(p2)}",
                         ["A incl", "IC incl"], ["A incl" if allow_ok else "A not incl",
                                                 "IC incl" if ic_ok else "IC not incl"],
                         allow_ok and ic_ok)


@_timed
def check_extremes(st: Stratification, subdivisions: int = 1, name: str = "") -> TheoremReport:
    """Huge p: IH = H(X).  Very negative p: IH = H of the simplices missing the singular set."""
    sub = subdivided(st, subdivisions)
    n = st.n
    high = homology(intersection_chain_complex(constant(sub, n + 1)), "Z")
    ordinary = homology(simplicial_chain_complex(sub.base), "Z")
    low = homology(intersection_chain_complex(constant(sub, -(n + 2))), "Z")
    X = sub.base
    sing = {s[0] for s in X.simplices(0) if sub.filtration.level(s) < n}
    away = [s for s in X.all_simplices() if not sing & set(s)]
    if away:
        A = X.subcomplex(away)
        missing = homology(simplicial_chain_complex(A), "Z")
        pad = HomologyResult(missing.betti + [0] * (len(low.betti) - len(missing.betti)),
                             missing.torsion + [[]] * (len(low.betti) - len(missing.torsion)))
    else:
        pad = HomologyResult([0] * len(low.betti), [[] for _ in low.betti])
    ok = high.key() == ordinary.key() and low.key() == pad.key()
    return TheoremReport("extremes", name or st.base.name, "const(n+1) / const(-n-2)",
                         [ordinary.groups(), pad.groups()], [high.groups(), low.groups()], ok)


# -- quotients ----------------------------------------------------------------------------------


@_timed
def check_quotient(action: SimplicialAction, spec="zero", name: str = "",
                   quotient_subdivisions: int = 1) -> TheoremReport:
    """rank IH(X/G; Q) = rank of the G-invariants of IH(X; Q)."""
    p = from_spec(action.strat, spec)
    a = regularize(action)
    p = p.on(a.strat)
    inv = invariant_ih(a, p)
    q = quotient(a)
    pq = transport_to_quotient(p, q.strat, q)
    hq = ih(pq, quotient_subdivisions, "Q")
    note = f"|G|={a.order}, {a.subdivisions} subdivisions to regularize"
    if not inv.idempotent:
        note += "; averaged projector is not idempotent"
    return TheoremReport("quotient", name or a.base.name, _pname(p), inv.ranks, hq.betti,
                         inv.ranks == hq.betti and inv.idempotent, note=note)


# -- blow-up -------------------------------------------------------------------------------------


@_timed
def check_blowup(max_dim: int = 5, prisms: Sequence = ((), (("p0", "p1"),)),
                 prism_max_dim: int = 3, samples: int = 10, seed: int = 0) -> TheoremReport:
    """Boundary identity over every decomposition of Delta^d, d <= max_dim, plus L spot checks."""
    total = failed = 0
    first_fail = ""
    for prism in prisms:
        top = max_dim if not prism else min(max_dim, prism_max_dim)
        for d in range(1, top + 1):
            for dec in bl.decompositions(d):
                b = bl.blow_up(dec, prism)
                rep = bl.boundary_faces(b, samples, seed)
                m = bl.check_map(b, samples, seed)
                total += 1
                if not (rep.holds and m.ok):
                    failed += 1
                    first_fail = first_fail or repr(dec.blocks)
    note = f"{total} decompositions" + (f"; first failure {first_fail}" if failed else "")
    return TheoremReport("blowup-boundary", f"Delta^d, d<={max_dim}", "-", [0], [failed], failed == 0,
                         note=note)


@_timed
def check_blowup_subdivision(max_dim: int = 3, samples: int = 10, seed: int = 0) -> TheoremReport:
    total = failed = 0
    for d in range(1, max_dim + 1):
        for dec in bl.decompositions(d):
            for flag in bl.full_flags(dec.vertices):
                w = bl.subdivision_compatibility(dec, flag, samples=samples, seed=seed)
                total += 1
                if not (w.commutes and w.regular_parts_agree):
                    failed += 1
    return TheoremReport("blowup-subdivision", f"Delta^d, d<={max_dim}", "-", [0], [failed],
                         failed == 0, note=f"{total} (decomposition, top flag) pairs")


# -- suites ----------------------------------------------------------------------------------------


CONE_BASES = ("circle", "sphere", "torus", "rp2")


def suite_cone(subdivisions: int = DEFAULT_SUBDIVISIONS) -> list[TheoremReport]:
    out = []
    for name in CONE_BASES:
        X = get_fixture(name)
        for a in range(0, X.n):
            out.append(check_cone_formula(X, a, subdivisions=subdivisions, name=name))
    return out


def _fixtures(include_counterexamples: bool = False) -> list[str]:
    return [n for n, f in FIXTURES.items() if include_counterexamples or not f.counterexample]


def suite_product(subdivisions: int = 1) -> list[TheoremReport]:
    out = []
    for name in _fixtures():
        st = get_fixture(name)
        for pf in (zero_perversity, top_perversity):
            out.append(check_product_invariance(pf(st), subdivisions, name=name))
    return out


def mv_covers() -> list[tuple]:
    """(name, stratification, U facets, V facets) on the fixture or a subdivision of it."""
    circle = get_fixture("circle")
    arcs = ([(0, 1), (1, 2)], [(0, 2)])
    st = get_fixture("sigma-t2")
    X = st.base
    north = [X.labels(f) for f in X.facets if "north" in X.labels(f)]
    south = [X.labels(f) for f in X.facets if "south" in X.labels(f)]
    c1 = subdivided(get_fixture("cone-s1"), 1)
    Y = c1.base
    apex = Y.vertex_index(("apex",))
    near = [Y.labels(f) for f in Y.facets if apex in f]
    far = [Y.labels(f) for f in Y.facets if apex not in f]
    return [("circle", circle, *arcs), ("sigma-t2", st, north, south), ("cone-s1", c1, near, far)]


def suite_mv(subdivisions: int = 1) -> list[TheoremReport]:
    out = []
    for name, st, U, V in mv_covers():
        perversities = [zero_perversity(st), top_perversity(st)]
        if name == "sigma-t2":
            perversities.append(from_spec(st, {"@north": 0, "@south": 1}))
        for p in perversities:
            out.append(check_mayer_vietoris(p, U, V, subdivisions, name=name))
    return out


def suite_duality(subdivisions: int = DEFAULT_SUBDIVISIONS) -> list[TheoremReport]:
    out = [check_duality(zero_perversity(get_fixture("sphere")), subdivisions, name="sphere")]
    st = get_fixture("sigma-t2")
    for a in (0, 1):
        for b in (0, 1):
            out.append(check_duality(from_spec(st, {"@north": a, "@south": b}), subdivisions,
                                     name="sigma-t2"))
    out.append(check_duality(lower_middle(st), subdivisions, name="sigma-t2"))
    return out


def suite_subdivision(subdivisions: int = DEFAULT_SUBDIVISIONS,
                      names: Sequence[str] | None = None) -> list[TheoremReport]:
    out = []
    for name in names or _fixtures():
        st = get_fixture(name)
        coarse = subdivided(st, subdivisions)
        fine = subdivided(coarse, 1)
        for pf in (zero_perversity, top_perversity):
            out.append(check_small_chain_subdivision(pf(st), subdivisions, name=name,
                                                     coarse=coarse, fine=fine))
        del coarse, fine
    return out


def suite_monotone() -> list[TheoremReport]:
    out = []
    for name in _fixtures():
        st = subdivided(get_fixture(name), 1)
        chain = [zero_perversity(st), lower_middle(st), upper_middle(st), top_perversity(st)]
        for p, p2 in zip(chain, chain[1:]):
            out.append(check_monotone(p, p2, name=name))
        out.append(check_extremes(get_fixture(name), name=name))
    return out


QUOTIENT_CASES = (
    ("octahedron-antipodal", "zero"),
    ("torus-z3", "zero"),
    ("torus-z7", "zero"),
    ("circle-rotation", "zero"),
    ("sigma-octahedron-antipodal", "zero"),
    ("sigma-octahedron-antipodal", "top"),
    ("sigma-t2-z3", {"@north": 0, "@south": 1}),
    ("sigma-s1-swap", "zero"),
)


def suite_quotient() -> list[TheoremReport]:
    out = []
    for name, spec in QUOTIENT_CASES:
        af = ACTIONS[name]
        a = SimplicialAction.from_labels(af.build(), af.generators)
        out.append(check_quotient(a, spec, name=name))
    return out


def suite_blowup() -> list[TheoremReport]:
    return [check_blowup(), check_blowup_subdivision()]


SUITES: dict[str, Callable[[], list[TheoremReport]]] = {
    "cone": suite_cone,
    "product": suite_product,
    "mv": suite_mv,
    "duality": suite_duality,
    "blowup": suite_blowup,
    "quotient": suite_quotient,
    "monotone": suite_monotone,
    "subdivision": suite_subdivision,
}


def render(reports: Sequence[TheoremReport], timings: bool = False) -> str:
    rows = [("theorem", "fixture", "perversity", "expected", "computed", "verdict", "note")]
    for r in reports:
        rows.append((r.theorem, r.fixture, r.perversity, _fmt(r.expected), _fmt(r.computed),
                     "PASS" if r.passed else "FAIL",
                     r.note + (f" [{r.runtime:.2f}s]" if timings else "")))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]) - 1)]
    lines = []
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)) + "  " + row[-1])
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed}/{len(reports)} checks passed")
    return "\n".join(l.rstrip() for l in lines)


def _fmt(v) -> str:
    if isinstance(v, list):
        return "(" + ", ".join(_fmt(x) for x in v) + ")"
    return str(v)
