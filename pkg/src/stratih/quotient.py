"""Finite simplicial group actions, regularization and quotients."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import linalg
from .complex import SimplicialComplex, label_key, render_label
from .ih import ChainComplexPresentation, check_filtered, induced_map, intersection_chain_complex
from .perversity import Perversity, PerversityNotDefined, transport
from .rational import Rational
from .stratification import (AxiomResult, Filtration, Stratification, ValidationReport,
                             derive_strata)
from .stratified import subdivide

MAX_ORDER = 10_000


class GroupTooLarge(ValueError):
    pass


class NotSimplicial(ValueError):
    pass


class NotRegular(ValueError):
    pass


class NotRegularAfterTwoSubdivisions(NotRegular):
    pass


class PerversityNotInvariant(ValueError):
    pass


def _compose(g: tuple, h: tuple) -> tuple:
    """(g o h)(v) = g[h[v]]."""
    return tuple(g[v] for v in h)


@dataclass
class SimplicialAction:
    """A finite group acting on the vertices of ``strat.base`` (as permutations
    of vertex indices), generated by ``generators``."""

    strat: Stratification
    generators: list[tuple]
    elements: list[tuple] = field(default_factory=list)
    subdivisions: int = 0

    @classmethod
    def from_labels(cls, strat: Stratification, generators: Sequence[Mapping],
                    max_order: int = MAX_ORDER) -> "SimplicialAction":
        X = strat.base
        gens = []
        for g in generators:
            try:
                perm = tuple(X.vertex_index(g.get(v, v)) for v in X.vertices)
            except KeyError as exc:
                raise NotSimplicial(f"generator sends a vertex outside the complex: {exc}") from None
            if len(set(perm)) != len(perm):
                raise NotSimplicial("generator is not a bijection on vertices")
            gens.append(perm)
        return cls(strat, gens, _closure(gens, len(X.vertices), max_order))

    @property
    def base(self) -> SimplicialComplex:
        return self.strat.base

    @property
    def order(self) -> int:
        return len(self.elements)

    def label_map(self, g: tuple) -> dict:
        X = self.base
        return {X.vertices[v]: X.vertices[g[v]] for v in range(len(g))}

    def apply(self, g: tuple, s: tuple) -> tuple:
        return tuple(sorted(g[v] for v in s))

    def orbits(self) -> list[list[int]]:
        seen = set()
        out = []
        for v in range(len(self.base.vertices)):
            if v in seen:
                continue
            orb = sorted({g[v] for g in self.elements})
            seen.update(orb)
            out.append(orb)
        return out


def _closure(gens: list[tuple], n: int, max_order: int) -> list[tuple]:
    ident = tuple(range(n))
    elements = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                e = _compose(g, h)
                if e not in elements:
                    elements.add(e)
                    nxt.append(e)
                    if len(elements) > max_order:
                        raise GroupTooLarge(f"group order exceeds {max_order}")
        frontier = nxt
    return sorted(elements)


# -- validation ------------------------------------------------------------------------


def _simplicial_failures(a: SimplicialAction) -> list:
    X = a.base
    bad = []
    for g in a.generators:
        for f in X.facets:
            if a.apply(g, f) not in X:
                bad.append(X.labels(f))
                break
    return bad


def _regularity_failures(a: SimplicialAction) -> tuple[list, list]:
    X = a.base
    orbit_of = {}
    for i, orb in enumerate(a.orbits()):
        for v in orb:
            orbit_of[v] = i
    first = []
    for s in X.all_simplices():
        if len({orbit_of[v] for v in s}) < len(s):
            first.append(X.labels(s))
            if len(first) >= 5:
                break
    second = []
    seen: dict = {}
    for s in X.all_simplices():
        key = tuple(sorted(orbit_of[v] for v in s))
        seen.setdefault(key, []).append(s)
    for key, members in seen.items():
        orbit = {a.apply(g, members[0]) for g in a.elements}
        if len(orbit) != len(members):
            second.append(X.labels(members[0]))
            if len(second) >= 5:
                break
    return first, second


def validate_action(a: SimplicialAction) -> ValidationReport:
    X = a.base
    results = []
    bad = _simplicial_failures(a)
    results.append(AxiomResult("simplicial", not bad, [[render_label(v) for v in s] for s in bad]))
    results.append(AxiomResult("finite", 0 < a.order <= MAX_ORDER, note=f"order {a.order}"))
    lv = a.strat.filtration
    bad = []
    if not results[0].passed:
        results.append(AxiomResult("filtration", False, note="not simplicial"))
    else:
        for g in a.generators:
            for s in X.all_simplices():
                if lv.level(a.apply(g, s)) != lv.level(s):
                    bad.append(X.labels(s))
                    break
        results.append(AxiomResult("filtration", not bad, [[render_label(v) for v in s] for s in bad]))
    if results[0].passed:
        first, second = _regularity_failures(a)
        results.append(AxiomResult("orbit-separation", not first,
                                   [[render_label(v) for v in s] for s in first],
                                   note="no simplex has two vertices in one orbit"))
        results.append(AxiomResult("orbit-lifting", not second,
                                   [[render_label(v) for v in s] for s in second],
                                   note="simplices with the same image form one orbit"))
    return ValidationReport(results)


def is_regular(a: SimplicialAction) -> bool:
    first, second = _regularity_failures(a)
    return not first and not second


def subdivide_action(a: SimplicialAction) -> SimplicialAction:
    X = a.base
    st, sd = subdivide(a.strat)
    Y = sd.complex
    gens = []
    for g in a.generators:
        gens.append(tuple(Y.vertex_index(X.labels(a.apply(g, sd.carrier[v])))
                          for v in range(len(Y.vertices))))
    return SimplicialAction(st, gens, _closure(gens, len(Y.vertices), MAX_ORDER),
                            a.subdivisions + 1)


def regularize(a: SimplicialAction) -> SimplicialAction:
    """Subdivide (at most twice) until the action is regular."""
    if _simplicial_failures(a):
        raise NotSimplicial("action does not map simplices to simplices")
    for _ in range(3):
        if is_regular(a):
            return a
        if a.subdivisions >= 2:
            break
        a = subdivide_action(a)
    first, second = _regularity_failures(a)
    raise NotRegularAfterTwoSubdivisions(f"still not regular; witnesses {first or second}")


# -- quotient -------------------------------------------------------------------------------


@dataclass
class QuotientComplex:
    strat: Stratification
    projection: dict  # vertex label -> orbit label
    action: SimplicialAction

    @property
    def complex(self) -> SimplicialComplex:
        return self.strat.base


def quotient(a: SimplicialAction) -> QuotientComplex:
    if not is_regular(a):
        raise NotRegular("action is not regular; call regularize first")
    X = a.base
    f = a.strat.filtration
    rep = {}
    for orb in a.orbits():
        label = min((X.vertices[v] for v in orb), key=label_key)
        for v in orb:
            rep[X.vertices[v]] = label
    facets = {tuple(sorted({rep[v] for v in X.labels(s)}, key=label_key)) for s in X.facets}
    Q = SimplicialComplex.from_facets(facets, name=f"{X.name}/G")
    levels = [[f.top] * len(Q.simplices(k)) for k in range(Q.dim + 1)]
    for k in range(X.dim + 1):
        for s, lv in zip(X.simplices(k), f.levels[k]):
            img = Q.simplex(rep[v] for v in X.labels(s))
            p = Q.position(img)
            levels[k][p] = min(levels[k][p], lv)
    st = derive_strata(Filtration(Q, levels, top=f.top))
    return QuotientComplex(st, rep, a)


def transport_to_quotient(p: Perversity, target: Stratification, q: QuotientComplex) -> Perversity:
    """p on X/G: p(pi(S)) = p(S); p must agree on strata with a common image."""
    X = p.strat.base
    Q = target.base
    image_of: dict[int, set] = {}
    for s in X.all_simplices():
        j = target.stratum_index_of(Q.simplex(q.projection[v] for v in X.labels(s)))
        image_of.setdefault(j, set()).add(p.strat.stratum_index_of(s))
    values = {}
    for j in target.singular:
        vals = {p.values[i] for i in image_of[j]}
        if None in vals:
            raise PerversityNotDefined(f"{target.strata[j].id} has a regular preimage")
        if len(vals) != 1:
            raise PerversityNotInvariant(f"strata over {target.strata[j].id} carry values {sorted(vals)}")
        values[j] = vals.pop()
    return transport(p, target, lambda j: None, values)


def check_invariant(p: Perversity, a: SimplicialAction) -> None:
    st = p.strat
    for g in a.generators:
        for i, stratum in enumerate(st.strata):
            j = st.stratum_index_of(a.apply(g, stratum.simplices[0]))
            if p.values[i] != p.values[j]:
                raise PerversityNotInvariant(
                    f"p({stratum.id}) = {p.values[i]} but p({st.strata[j].id}) = {p.values[j]}")


# -- invariants ------------------------------------------------------------------------------


@dataclass
class InvariantResult:
    ranks: list[int]
    full_ranks: list[int]
    projectors: list  # averaged projector per degree (exact rationals)
    idempotent: bool


def invariant_ih(a: SimplicialAction, p: Perversity | None = None,
                 c: ChainComplexPresentation | None = None) -> InvariantResult:
    """Ranks of the G-invariant part of IH(X; Q), via (1/|G|) sum g_*."""
    if p is None:
        from .perversity import zero_perversity
        p = zero_perversity(a.strat)
    check_invariant(p, a)
    for g in a.generators:
        check_filtered(a.label_map(g), a.strat, a.strat)
    c = c or intersection_chain_complex(p)
    hb = c.homology_basis
    ranks, full, projectors = [], [], []
    idem = True
    for k in range(c.top + 1):
        r = hb.rank(k)
        full.append(r)
        P = [[Rational(0)] * r for _ in range(r)]
        for g in a.elements:
            M = induced_map(a.label_map(g), c, c, k, checked=True)
            for i in range(r):
                for j in range(r):
                    P[i][j] += M[i][j]
        n = Rational(1, a.order)
        P = [[x * n for x in row] for row in P]
        idem = idem and linalg.matmul(P, P) == P
        projectors.append(P)
        ranks.append(linalg.rank(P) if r else 0)
    return InvariantResult(ranks, full, projectors, idem)
