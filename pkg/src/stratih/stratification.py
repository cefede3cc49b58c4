"""Filtrations B_0 <= ... <= B_n of a simplicial complex and their strata.

A filtration is stored as a *level* per simplex: the least i with the
simplex in B_i.  Strata are the connected pieces of B_i minus B_{i-1},
joined through face incidences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .complex import (ComplexError, NotInComplex, SimplicialComplex, Subdivision,
                      facets_of, label_key, render_label)


class InvalidFiltration(ComplexError):
    pass


class NotSubcomplex(ComplexError):
    pass


class Filtration:
    """Nested skeleta, one level per simplex (``levels[k][position]``)."""

    def __init__(self, base: SimplicialComplex, levels: Sequence[Sequence[int]], top: int | None = None):
        self.base = base
        self.levels = tuple(tuple(l) for l in levels)
        self.top = base.dim if top is None else top

    @classmethod
    def from_skeleta(cls, base: SimplicialComplex, skeleta: Mapping[int, Iterable[Iterable]],
                     top: int | None = None) -> "Filtration":
        """Build from ``{i: facets of B_i}`` (labels).  Missing indices inherit B_{i-1}."""
        n = base.dim if top is None else top
        levels = [[n] * len(base.simplices(k)) for k in range(base.dim + 1)]
        keys = sorted(int(i) for i in skeleta)
        if keys and (keys[0] < 0 or keys[-1] > n):
            raise InvalidFiltration(f"skeleton indices must lie in 0..{n}")
        previous: set = set()
        for i in range(n):
            if i in keys:
                facets = skeleta[i] if i in skeleta else skeleta[str(i)]
                try:
                    simp = [base.simplex(f) for f in facets]
                except NotInComplex as exc:
                    raise InvalidFiltration(f"B_{i} is not a subcomplex: {exc}") from None
                current = base.closure(simp)
                if not previous <= current:
                    raise InvalidFiltration(f"B_{i - 1} is not contained in B_{i}")
                too_big = [s for s in current if len(s) - 1 > i]
                if too_big:
                    raise InvalidFiltration(
                        f"B_{i} contains {base.labels(min(too_big))} of dimension > {i}")
                previous = current
            for s in previous:
                k = len(s) - 1
                p = base.position(s)
                if levels[k][p] > i:
                    levels[k][p] = i
        return cls(base, levels, top=n)

    @classmethod
    def trivial(cls, base: SimplicialComplex) -> "Filtration":
        return cls(base, [[base.dim] * len(base.simplices(k)) for k in range(base.dim + 1)])

    def level(self, s) -> int:
        return self.levels[len(s) - 1][self.base.position(s)]

    def skeleton(self, i: int) -> set:
        X = self.base
        return {s for k in range(X.dim + 1)
                for s, lv in zip(X.simplices(k), self.levels[k]) if lv <= i}

    def skeleta_json(self) -> dict:
        X = self.base
        out = {}
        for i in range(self.top):
            sk = self.skeleton(i)
            if not sk:
                continue
            maximal = [s for s in sk if not any(set(s) < set(t) for t in sk if len(t) == len(s) + 1)]
            out[str(i)] = sorted(([render_label(v) for v in X.labels(s)] for s in maximal))
        return out

    def to_json(self) -> dict:
        return {"complex": self.base.to_json(), "skeleta": self.skeleta_json()}

    def __eq__(self, other) -> bool:
        return (isinstance(other, Filtration) and self.base == other.base
                and self.top == other.top and self._by_labels() == other._by_labels())

    def _by_labels(self) -> dict:
        X = self.base
        return {X.labels(s): lv for k in range(X.dim + 1)
                for s, lv in zip(X.simplices(k), self.levels[k])}

    def subdivide(self, sd: Subdivision) -> "Filtration":
        """Carrier transport: a new simplex lies in B_i iff its largest carrier does."""
        carrier_level = [self.level(c) for c in sd.carrier]
        carrier_len = [len(c) for c in sd.carrier]
        Y = sd.complex
        levels = [[carrier_level[max(s, key=carrier_len.__getitem__)] for s in Y.simplices(k)]
                  for k in range(Y.dim + 1)]
        return Filtration(Y, levels, top=self.top)


@dataclass
class Stratum:
    id: str
    dim: int
    simplices: list = field(repr=False)

    def __len__(self):
        return len(self.simplices)


class Stratification:
    """Strata derived from a filtration, with the closure partial order."""

    def __init__(self, filtration: Filtration, strata: list[Stratum], stratum_of: Sequence[Sequence[int]]):
        self.filtration = filtration
        self.strata = strata
        self.stratum_of = tuple(tuple(x) for x in stratum_of)
        self._by_id = {s.id: i for i, s in enumerate(strata)}

    @property
    def base(self) -> SimplicialComplex:
        return self.filtration.base

    @property
    def n(self) -> int:
        return self.filtration.top

    def index(self, stratum_id: str) -> int:
        try:
            return self._by_id[stratum_id]
        except KeyError:
            raise KeyError(f"unknown stratum {stratum_id!r}") from None

    def codim(self, i: int) -> int:
        return self.n - self.strata[i].dim

    def is_singular(self, i: int) -> bool:
        return self.strata[i].dim < self.n

    @property
    def singular(self) -> list[int]:
        return [i for i, s in enumerate(self.strata) if s.dim < self.n]

    @property
    def regular(self) -> list[int]:
        return [i for i, s in enumerate(self.strata) if s.dim == self.n]

    def stratum_index_of(self, s) -> int:
        return self.stratum_of[len(s) - 1][self.base.position(s)]

    def stratum_containing(self, labels: Iterable) -> int:
        return self.stratum_index_of(self.base.simplex(labels))

    @cached_property
    def touches(self) -> list[frozenset]:
        """touches[j] = strata meeting the closure of stratum j (j included)."""
        out = []
        for j, st in enumerate(self.strata):
            seen = {j}
            for s in st.simplices:
                for k in range(len(s) - 1):
                    for f in combinations(s, k + 1):
                        seen.add(self.stratum_index_of(f))
            out.append(frozenset(seen))
        return out

    def below(self, a: int, b: int) -> bool:
        """a precedes-or-equals b in the closure order."""
        return a in self.touches[b]

    def closure_simplices(self, j: int) -> set:
        return self.base.closure(self.strata[j].simplices)

    def depth(self) -> int:
        order = sorted(range(len(self.strata)), key=lambda j: self.strata[j].dim)
        longest = {}
        for j in order:
            longest[j] = max((longest[i] + 1 for i in self.touches[j]
                              if self.strata[i].dim < self.strata[j].dim), default=0)
        return max(longest.values(), default=0)

    def perversity_key(self) -> list[str]:
        return [self.strata[i].id for i in self.singular]

    def describe(self) -> list[dict]:
        X = self.base
        rows = []
        for i, st in enumerate(self.strata):
            first = min(st.simplices, key=lambda s: (len(s), s))
            rows.append({"id": st.id, "dim": st.dim, "codim": self.codim(i),
                         "simplices": len(st), "witness": [render_label(v) for v in X.labels(first)]})
        return rows

    def subdivide(self, sd: Subdivision) -> "Stratification":
        """Transport strata to the subdivision: a new open simplex lies in the
        stratum of its largest carrier."""
        carrier_stratum = [self.stratum_index_of(c) for c in sd.carrier]
        carrier_len = [len(c) for c in sd.carrier]
        Y = sd.complex
        stratum_of = []
        members: list[list] = [[] for _ in self.strata]
        for k in range(Y.dim + 1):
            row = []
            for s in Y.simplices(k):
                j = carrier_stratum[max(s, key=carrier_len.__getitem__)]
                row.append(j)
                members[j].append(s)
            stratum_of.append(row)
        strata = [Stratum(st.id, st.dim, m) for st, m in zip(self.strata, members)]
        out = Stratification(self.filtration.subdivide(sd), strata, stratum_of)
        out.__dict__["touches"] = self.touches  # closure order is unchanged by subdivision
        return out


def derive_strata(f: Filtration, ids_from: Stratification | None = None) -> Stratification:
    """Connected components of B_i - B_{i-1} for each i."""
    X = f.base
    cells = [(k, p) for k in range(X.dim + 1) for p in range(len(X.simplices(k)))]
    flat = {c: n for n, c in enumerate(cells)}
    parent = list(range(len(cells)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in range(1, X.dim + 1):
        pos = X._pos[k - 1]
        for p, s in enumerate(X.simplices(k)):
            lv = f.levels[k][p]
            for face in facets_of(s):
                q = pos[face]
                if f.levels[k - 1][q] == lv:
                    a, b = find(flat[(k, p)]), find(flat[(k - 1, q)])
                    if a != b:
                        parent[a] = b
    groups: dict[int, list] = {}
    for n, (k, p) in enumerate(cells):
        groups.setdefault(find(n), []).append(X.simplices(k)[p])
    comps = []
    for members in groups.values():
        s0 = members[0]
        comps.append((f.level(s0), min(members, key=lambda s: (len(s), s)), members))
    comps.sort(key=lambda c: (c[0], len(c[1]), c[1]))
    strata = []
    stratum_of = [[0] * len(X.simplices(k)) for k in range(X.dim + 1)]
    counter: dict[int, int] = {}
    for j, (lv, _, members) in enumerate(comps):
        c = counter.get(lv, 0)
        counter[lv] = c + 1
        strata.append(Stratum(f"S{lv}_{c}", lv, sorted(members, key=lambda s: (len(s), s))))
        for s in members:
            stratum_of[len(s) - 1][X.position(s)] = j
    return Stratification(f, strata, stratum_of)


def stratify(base: SimplicialComplex, skeleta: Mapping | None = None) -> Stratification:
    f = Filtration.from_skeleta(base, skeleta or {}) if skeleta else Filtration.trivial(base)
    return derive_strata(f)


def stratification_from_strata(base: SimplicialComplex, assignment: Mapping[tuple, int],
                               top: int | None = None) -> Stratification:
    """Input sugar: formal stratum dimension per simplex (labels); unlisted
    simplices are regular.  Converted to a filtration and re-derived."""
    n = base.dim if top is None else top
    levels = [[n] * len(base.simplices(k)) for k in range(base.dim + 1)]
    for labels, lv in assignment.items():
        s = base.simplex(labels)
        levels[len(s) - 1][base.position(s)] = lv
    for k in range(base.dim, 0, -1):
        for p, s in enumerate(base.simplices(k)):
            for face in facets_of(s):
                q = base.position(face)
                if levels[k - 1][q] > levels[k][p]:
                    raise InvalidFiltration(f"{base.labels(face)} has a larger level than its coface")
    return derive_strata(Filtration(base, levels, top=n))


# -- validation -------------------------------------------------------------


@dataclass
class AxiomResult:
    name: str
    passed: bool
    witnesses: list = field(default_factory=list)
    note: str = ""


@dataclass
class ValidationReport:
    results: list[AxiomResult]
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "axioms": {r.name: {"pass": r.passed, "witnesses": r.witnesses, "note": r.note}
                           for r in self.results},
                "warnings": self.warnings}

    def table(self) -> str:
        width = max(len(r.name) for r in self.results)
        lines = [f"{'axiom'.ljust(width)}  verdict  witnesses"]
        for r in self.results:
            wit = "; ".join(" ".join(w) for w in r.witnesses[:3])
            lines.append(f"{r.name.ljust(width)}  {'PASS' if r.passed else 'FAIL':7}  {wit}".rstrip())
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines)


def _witness(X: SimplicialComplex, s) -> list[str]:
    return [render_label(v) for v in X.labels(s)]


def validate_pseudomanifold(st: Stratification) -> ValidationReport:
    X, f, n = st.base, st.filtration, st.n
    results = []

    bad = [s for s in X.facets if len(s) - 1 != n]
    results.append(AxiomResult("purity", not bad, [_witness(X, s) for s in bad[:5]]))

    # every simplex is a face of some regular n-simplex
    covered = set()
    for p, s in enumerate(X.simplices(n)):
        if f.levels[n][p] == n:
            covered.update(X.closure([s]))
    bad = [s for s in X.all_simplices() if s not in covered]
    results.append(AxiomResult("density", not bad, [_witness(X, s) for s in bad[:5]]))

    bad = [i for i in st.singular if st.codim(i) < 2]
    results.append(AxiomResult(
        "codimension", not bad,
        [_witness(X, st.strata[i].simplices[0]) for i in bad[:5]],
        note="no singular stratum of codimension < 2"))

    bad = []
    for j in range(len(st.strata)):
        cl = None
        for i in st.touches[j]:
            if i == j:
                continue
            cl = cl if cl is not None else st.closure_simplices(j)
            missing = [s for s in st.strata[i].simplices if s not in cl]
            if missing:
                bad.append(missing[0])
    results.append(AxiomResult("frontier", not bad, [_witness(X, s) for s in bad[:5]]))

    cofaces: dict = {}
    for s in X.simplices(n):
        for face in facets_of(s):
            cofaces[face] = cofaces.get(face, 0) + 1
    bad, boundary = [], 0
    if n >= 1:
        for p, s in enumerate(X.simplices(n - 1)):
            if f.levels[n - 1][p] != n:
                continue
            c = cofaces.get(s, 0)
            if c == 1:
                boundary += 1
            elif c != 2:
                bad.append(s)
    results.append(AxiomResult(
        "branch", not bad, [_witness(X, s) for s in bad[:5]],
        note=f"{boundary} boundary faces" if boundary else ""))

    # manifold heuristic on the regular stratum: vertex links look like spheres or balls
    warnings = []
    chi = [0] * len(X.vertices)
    for k in range(1, X.dim + 1):
        sign = 1 if k % 2 else -1
        for s in X.simplices(k):
            for v in s:
                chi[v] += sign
    sphere = 1 + (-1) ** (n - 1)
    odd = [v for v, lv in enumerate(f.levels[0]) if lv == n and chi[v] not in (sphere, 1)]
    if odd:
        warnings.append(f"{len(odd)} regular vertices have non-sphere links, e.g. "
                        f"{render_label(X.vertices[odd[0]])}")
    return ValidationReport(results, warnings)


def depth(st: Stratification) -> int:
    return st.depth()


def stratum_link(st: Stratification, sigma) -> Stratification:
    """Combinatorial link of ``sigma`` (index simplex) with the inherited filtration."""
    X, f = st.base, st.filtration
    if sigma not in X:
        raise NotInComplex(f"{sigma!r} not in complex")
    sset = set(sigma)
    link_levels = {}
    d = len(sigma) - 1
    for s in X.all_simplices():
        if len(s) <= len(sigma) or not sset <= set(s):
            continue
        tau = tuple(v for v in s if v not in sset)
        link_levels[tau] = f.level(s) - d - 1
    if not link_levels:
        raise ComplexError(f"{X.labels(sigma)} has an empty link")
    L = X.subcomplex(link_levels, name=f"lk({','.join(map(render_label, X.labels(sigma)))})")
    levels = []
    for k in range(L.dim + 1):
        row = []
        for s in L.simplices(k):
            orig = tuple(sorted(X.vertex_index(v) for v in L.labels(s)))
            row.append(link_levels[orig])
        levels.append(row)
    return derive_strata(Filtration(L, levels, top=f.top - d - 1))


def restrict(st: Stratification, U) -> tuple[Stratification, dict]:
    """Stratification of a subcomplex ``U`` (a SimplicialComplex over the same
    labels, or a set of index simplices).  Returns the restricted stratification
    and the map new-stratum-index -> parent-stratum-index."""
    X, f = st.base, st.filtration
    if isinstance(U, SimplicialComplex):
        try:
            simplices = [X.simplex(U.labels(s)) for s in U.all_simplices()]
        except NotInComplex as exc:
            raise NotSubcomplex(str(exc)) from None
        sub = U
    else:
        simplices = list(U)
        if not X.is_subcomplex_set(simplices):
            raise NotSubcomplex("not closed under faces or not in the base")
        sub = X.subcomplex(simplices)
    levels = []
    for k in range(sub.dim + 1):
        levels.append([f.level(X.simplex(sub.labels(s))) for s in sub.simplices(k)])
    new = derive_strata(Filtration(sub, levels, top=f.top))
    parent = {}
    for j, s in enumerate(new.strata):
        parent[j] = st.stratum_index_of(X.simplex(sub.labels(s.simplices[0])))
    return new, parent
