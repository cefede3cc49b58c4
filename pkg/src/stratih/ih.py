"""Intersection homology from allowable simplices.

A simplex is allowable when, for each singular stratum S, the largest face
of the simplex lying in the closure of S is small enough:

    codim S <= dim(simplex) - dim(face) + p(S)

Simplices missing the closure of S entirely are unconstrained by S.  The
intersection chains IC_i are the integer chains made of allowable simplices
whose boundary is again made of allowable simplices.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Mapping

from . import linalg
from .complex import SimplicialComplex, render_label
from .perversity import Perversity
from .rational import Rational
from .snf import EchelonLattice, Reduction, homology_ranks, integer_kernel, paused_gc
from .stratification import Stratification


class NotFiltered(ValueError):
    pass


class NotAllowable(ValueError):
    pass


# -- allowability ----------------------------------------------------------------


@dataclass(frozen=True)
class StratumRecord:
    stratum: str
    codim: int
    face_dim: int  # -1 for the empty face
    codim_in_simplex: int
    perversity: int
    passed: bool


@dataclass(frozen=True)
class AllowabilityVerdict:
    simplex: tuple
    records: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def __bool__(self) -> bool:
        return self.passed


class Allowability:
    """Precomputed lookups for testing many simplices against one perversity."""

    def __init__(self, p: Perversity):
        st = p.strat
        self.p = p
        self.st = st
        self.X = st.base
        self.vstrat = st.stratum_of[0]
        self.touches = st.touches
        up: list[list[int]] = [[] for _ in st.strata]
        for S in st.singular:
            for j in st.touches[S]:
                up[j].append(S)
        self.up = [tuple(sorted(u)) for u in up]
        self.codim = [st.codim(i) for i in range(len(st.strata))]
        self.value = p.values

    def face_in_closure(self, s: tuple, S: int) -> tuple:
        """Largest face of ``s`` inside the closure of stratum S (possibly empty)."""
        T = self.touches[S]
        vs = self.vstrat
        W = tuple(v for v in s if vs[v] in T)
        if len(W) <= 1:
            return W
        st = self.st
        if st.stratum_of[len(W) - 1][self.X._pos[len(W) - 1][W]] in T:
            return W
        for size in range(len(W) - 1, 1, -1):
            for f in combinations(W, size):
                if st.stratum_of[size - 1][self.X._pos[size - 1][f]] in T:
                    return f
        return W[:1]

    def candidates(self, s: tuple) -> set:
        up, vs = self.up, self.vstrat
        out: set = set()
        for v in s:
            out.update(up[vs[v]])
        return out

    def allowed(self, s: tuple) -> bool:
        up, vs = self.up, self.vstrat
        cands = None
        for v in s:
            u = up[vs[v]]
            if u:
                if cands is None:
                    cands = set(u)
                else:
                    cands.update(u)
        if cands is None:
            return True
        d = len(s) - 1
        for S in cands:
            fd = len(self.face_in_closure(s, S)) - 1
            if self.codim[S] > d - fd + self.value[S]:
                return False
        return True

    def verdict(self, s: tuple) -> AllowabilityVerdict:
        d = len(s) - 1
        cands = self.candidates(s)
        records = []
        for S in self.st.singular:
            face = self.face_in_closure(s, S) if S in cands else ()
            fd = len(face) - 1
            cd = d - fd
            ok = True if not face else self.codim[S] <= cd + self.value[S]
            records.append(StratumRecord(self.st.strata[S].id, self.codim[S], fd, cd,
                                         self.value[S], ok))
        return AllowabilityVerdict(self.X.labels(s), tuple(records))


def is_allowable(sigma, st: Stratification, p: Perversity) -> AllowabilityVerdict:
    """Verdict for a simplex given by vertex labels or as an index tuple."""
    X = st.base
    s = sigma if sigma in X else X.simplex(sigma)
    return Allowability(p).verdict(s)


# -- intersection chain complex ----------------------------------------------------


class _Components:
    """Union-find over simplex positions."""

    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def add(self, x):
        self.parent.setdefault(x, x)

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


@dataclass
class _Degree:
    pure: list  # positions of pure simplices (basis 0..len(pure)-1)
    pure_index: dict
    comp_of: dict  # position -> component number
    lattices: list  # EchelonLattice per component
    offsets: list  # first basis index of each component

    @property
    def size(self) -> int:
        return len(self.pure) + sum(len(l.vectors) for l in self.lattices)


class ChainComplexPresentation:
    """Bases of IC_k as integer chains on k-simplices and the boundary matrices
    D_k : IC_k -> IC_{k-1} in those bases (column-sparse)."""

    def __init__(self, strat: Stratification, perversity: Perversity | None,
                 allow: list, degrees: list[_Degree], boundaries: list[list[dict]]):
        self.strat = strat
        self.perversity = perversity
        self.allow = allow
        self._deg = degrees
        self.boundaries = boundaries

    @property
    def base(self) -> SimplicialComplex:
        return self.strat.base

    @property
    def top(self) -> int:
        return len(self._deg) - 1

    @property
    def sizes(self) -> list[int]:
        return [d.size for d in self._deg]

    def is_allowable_position(self, k: int, pos: int) -> bool:
        return bool(self.allow[k][pos])

    def chain(self, k: int, i: int) -> dict:
        """Basis element i of IC_k as {simplex position: coefficient}."""
        d = self._deg[k]
        if i < len(d.pure):
            return {d.pure[i]: 1}
        c = bisect_right(d.offsets, i) - 1
        return dict(d.lattices[c].vectors[i - d.offsets[c]])

    def coordinates(self, k: int, chain: Mapping[int, int]) -> dict:
        """Express an integer chain {simplex position: coeff} in the IC_k basis."""
        d = self._deg[k]
        out: dict = {}
        parts: dict = {}
        for pos, v in chain.items():
            if not v:
                continue
            i = d.pure_index.get(pos)
            if i is not None:
                out[i] = v
                continue
            c = d.comp_of.get(pos)
            if c is None:
                raise NotAllowable(
                    f"{self.base.labels(self.base.simplices(k)[pos])} is not allowable")
            parts.setdefault(c, {})[pos] = v
        for c, part in parts.items():
            coords = d.lattices[c].sparse_coordinates(part)
            if coords is None:
                raise NotAllowable(f"chain has a non-allowable boundary in degree {k}")
            off = d.offsets[c]
            for j, x in coords.items():
                out[off + j] = x
        return out

    def subcomplex_positions(self, k: int) -> set:
        """Allowable simplex positions of degree k (the support of A_k)."""
        return {p for p, a in enumerate(self.allow[k]) if a}

    @cached_property
    def homology_basis(self) -> "HomologyBasis":
        return HomologyBasis(self)


@paused_gc()
def intersection_chain_complex(p: Perversity, check: bool = True) -> ChainComplexPresentation:
    st = p.strat
    X = st.base
    A = Allowability(p)
    top = X.dim
    allow = [bytearray(A.allowed(s) for s in X.simplices(k)) for k in range(top + 1)]
    degrees: list[_Degree] = []
    for k in range(top + 1):
        ak = allow[k]
        if k == 0:
            pure = [i for i in range(len(ak)) if ak[i]]
            degrees.append(_Degree(pure, {q: i for i, q in enumerate(pure)}, {}, [], []))
            continue
        ftab = X.facet_table(k)
        below = allow[k - 1]
        pure, impure = [], {}
        for i, faces in enumerate(ftab):
            if not ak[i]:
                continue
            bad = [q for q in faces if not below[q]]
            if bad:
                impure[i] = bad
            else:
                pure.append(i)
        uf = _Components()
        for i, bad in impure.items():
            uf.add(i)
            for q in bad:
                uf.add(("f", q))
                uf.union(i, ("f", q))
        groups: dict = {}
        for i in impure:
            groups.setdefault(uf.find(i), []).append(i)
        comp_of, lattices, offsets = {}, [], []
        nxt = len(pure)
        for members in sorted(groups.values(), key=min):
            members.sort()
            rows: dict = {}
            for i in members:
                for j, q in enumerate(ftab[i]):
                    if not below[q]:
                        rows.setdefault(q, {})[i] = -1 if j % 2 else 1
            kernel = integer_kernel([rows[q] for q in sorted(rows)], members)
            lat = EchelonLattice(kernel, members)
            c = len(lattices)
            for i in members:
                comp_of[i] = c
            lattices.append(lat)
            offsets.append(nxt)
            nxt += len(lat.vectors)
        degrees.append(_Degree(pure, {q: i for i, q in enumerate(pure)}, comp_of, lattices, offsets))

    pres = ChainComplexPresentation(st, p, allow, degrees, [])
    boundaries: list[list[dict]] = [[{} for _ in range(degrees[0].size)]]
    for k in range(1, top + 1):
        ftab = X.facet_table(k)
        lower = degrees[k - 1]
        lower_pure = lower.pure_index
        cols = []
        for q in degrees[k].pure:
            # a pure simplex has only allowable faces; most of them are pure too
            col, sign = {}, 1
            for f in ftab[q]:
                i = lower_pure.get(f)
                if i is None:
                    break
                col[i] = sign
                sign = -sign
            else:
                cols.append(col)
                continue
            cols.append(pres.coordinates(k - 1, _boundary_of({q: 1}, ftab)))
        for i in range(len(degrees[k].pure), degrees[k].size):
            cols.append(pres.coordinates(k - 1, _boundary_of(pres.chain(k, i), ftab)))
        boundaries.append(cols)
    pres.boundaries = boundaries
    if check:
        _check_square_zero(boundaries, [len(d.pure) for d in degrees])
    return pres


def _boundary_of(chain: dict, ftab) -> dict:
    bd: dict = {}
    for q, c in chain.items():
        sign = c
        for f in ftab[q]:
            bd[f] = bd.get(f, 0) + sign
            sign = -sign
    return bd


def _check_square_zero(boundaries: list[list[dict]], npure: list[int] | None = None) -> None:
    # D D = 0 is automatic for a pure simplex whose boundary only meets pure
    # simplices (it is the simplicial identity), so with npure those are skipped
    for k in range(2, len(boundaries)):
        lower = boundaries[k - 1]
        cut_k = npure[k] if npure else 0
        cut_l = npure[k - 1] if npure else 0
        for j, col in enumerate(boundaries[k]):
            if j < cut_k and all(r < cut_l for r in col):
                continue
            acc: dict = {}
            for r, v in col.items():
                for rr, w in lower[r].items():
                    acc[rr] = acc.get(rr, 0) + v * w
            if any(acc.values()):
                raise ArithmeticError(f"D_{k - 1} D_{k} != 0 at column {j}")


def simplicial_chain_complex(X: SimplicialComplex) -> ChainComplexPresentation:
    """The full simplicial chain complex, as the intersection complex of the
    trivial stratification."""
    from .stratification import stratify
    from .perversity import zero_perversity
    return intersection_chain_complex(zero_perversity(stratify(X)))


# -- homology -------------------------------------------------------------------------


@dataclass
class HomologyResult:
    betti: list[int]
    torsion: list[list[int]]
    coefficients: str = "Z"
    perversity: object = None

    def degrees(self) -> list[dict]:
        return [{"i": i, "betti": b, "torsion": list(t)}
                for i, (b, t) in enumerate(zip(self.betti, self.torsion))]

    def to_json(self) -> dict:
        return {"perversity": self.perversity, "coefficients": self.coefficients,
                "degrees": self.degrees()}

    def table(self) -> str:
        lines = ["i  betti  torsion"]
        for i, (b, t) in enumerate(zip(self.betti, self.torsion)):
            tors = " + ".join(f"Z/{d}" for d in t) if t else "-"
            lines.append(f"{i:<2} {b:<6} {tors}")
        return "\n".join(lines)

    def groups(self) -> list[str]:
        """Per degree, e.g. 'Z^2 + Z/2' or '0'."""
        out = []
        for b, t in zip(self.betti, self.torsion):
            ring = "Q" if self.coefficients == "Q" else "Z"
            parts = ([ring if b == 1 else f"{ring}^{b}"] if b else []) + [f"Z/{d}" for d in t]
            out.append(" + ".join(parts) or "0")
        return out

    def key(self) -> tuple:
        return tuple(self.betti), tuple(tuple(t) for t in self.torsion)


def homology(c: ChainComplexPresentation, coefficients: str = "Z") -> HomologyResult:
    if coefficients not in ("Z", "Q"):
        raise ValueError("coefficients must be 'Z' or 'Q'")
    betti, torsion = homology_ranks(c.sizes, c.boundaries, field=coefficients)
    if coefficients == "Q":
        torsion = [[] for _ in betti]
    pv = c.perversity.to_json() if c.perversity is not None else None
    return HomologyResult(betti, torsion, coefficients, pv)


def compute_ih(p: Perversity, coefficients: str = "Z", subdivisions: int = 2) -> HomologyResult:
    """IH after ``subdivisions`` barycentric subdivisions of the input."""
    from .stratified import subdivided
    st = subdivided(p.strat, subdivisions)
    return homology(intersection_chain_complex(p.on(st)), coefficients)


# -- homology classes and induced maps ---------------------------------------------


class HomologyBasis:
    """A Q-basis of H_k(IC) for every k, with coordinates of cycles."""

    def __init__(self, c: ChainComplexPresentation):
        self.c = c
        self.red = Reduction(c.sizes, c.boundaries, field="Z", track=True)
        top = c.top
        self.surv = [self.red.survivors(k) for k in range(top + 1)]
        self.kept, self.classes = [], []
        for k in range(top + 1):
            n = len(self.surv[k])
            cycles = (linalg.nullspace(self.red.reduced_matrix(k), n) if k >= 1
                      else linalg.nullspace([], n))
            bounds = linalg.columns(self.red.reduced_matrix(k + 1)) if k < top else []
            kept, added = linalg.extend_basis(bounds, cycles)
            self.kept.append(kept)
            self.classes.append(added)

    def rank(self, k: int) -> int:
        return len(self.classes[k])

    def representative(self, k: int, j: int) -> dict:
        """Class j of degree k as a (rational) combination of IC_k basis elements."""
        vec = self.classes[k][j]
        core = {self.surv[k][i]: x for i, x in enumerate(vec) if x}
        return self.red.lift(k, core)

    def coordinates(self, k: int, chain: Mapping[int, object]) -> list[Rational]:
        """Coordinates of a cycle (in IC_k basis) in the class basis of degree k."""
        proj = self.red.project(k, dict(chain))
        index = {x: i for i, x in enumerate(self.surv[k])}
        v = [Rational(0)] * len(self.surv[k])
        for x, a in proj.items():
            v[index[x]] = Rational(a)
        sol = linalg.solve(self.kept[k] + self.classes[k], v)
        if sol is None:
            raise ArithmeticError("chain is not a cycle")
        return sol[len(self.kept[k]):]


def _vertex_map(f: Mapping, src: SimplicialComplex, dst: SimplicialComplex) -> list[int]:
    try:
        return [dst.vertex_index(f[v]) for v in src.vertices]
    except KeyError as exc:
        raise NotFiltered(f"vertex map undefined or lands outside the target: {exc}") from None


def check_filtered(f: Mapping, src: Stratification, dst: Stratification) -> None:
    """f must be simplicial and carry B_i into B_i."""
    X, Y = src.base, dst.base
    vm = _vertex_map(f, X, Y)
    for k in range(X.dim + 1):
        for s, lv in zip(X.simplices(k), src.filtration.levels[k]):
            img = tuple(sorted(set(vm[v] for v in s)))
            if img not in Y:
                raise NotFiltered(f"image of {X.labels(s)} is not a simplex")
            if dst.filtration.level(img) > lv:
                raise NotFiltered(
                    f"{X.labels(s)} lies in B_{lv} but its image does not "
                    f"({', '.join(map(render_label, Y.labels(img)))})")


def _image_chain(vm: list[int], X: SimplicialComplex, Y: SimplicialComplex, k: int,
                 chain: Mapping[int, int]) -> dict:
    out: dict = {}
    simp = X.simplices(k)
    pos = Y._pos[k]
    for q, c in chain.items():
        t = [vm[v] for v in simp[q]]
        if len(set(t)) < len(t):
            continue
        inv = sum(1 for a in range(len(t)) for b in range(a + 1, len(t)) if t[a] > t[b])
        key = pos[tuple(sorted(t))]
        out[key] = out.get(key, 0) + (-c if inv % 2 else c)
    return {q: v for q, v in out.items() if v}


def chain_map(f: Mapping, src: ChainComplexPresentation, dst: ChainComplexPresentation,
              k: int) -> list[dict]:
    """Column-sparse matrix of f_#: IC_k(src) -> IC_k(dst)."""
    check_filtered(f, src.strat, dst.strat)
    vm = _vertex_map(f, src.base, dst.base)
    return [dst.coordinates(k, _image_chain(vm, src.base, dst.base, k, src.chain(k, i)))
            for i in range(src.sizes[k])]


def induced_map(f: Mapping, src: ChainComplexPresentation, dst: ChainComplexPresentation,
                k: int, checked: bool = False) -> list[list[Rational]]:
    """Matrix of f_* : IH_k(src; Q) -> IH_k(dst; Q) in the computed class bases."""
    if not checked:
        check_filtered(f, src.strat, dst.strat)
    vm = _vertex_map(f, src.base, dst.base)
    hs, hd = src.homology_basis, dst.homology_basis
    cols = []
    for j in range(hs.rank(k)):
        rep = hs.representative(k, j)
        scale = math.lcm(*(Rational(x).denominator for x in rep.values())) if rep else 1
        simplex_chain: dict = {}
        for i, x in rep.items():
            m = int(x * scale)
            for q, c in src.chain(k, i).items():
                simplex_chain[q] = simplex_chain.get(q, 0) + m * c
        img = _image_chain(vm, src.base, dst.base, k, simplex_chain)
        coords = dst.coordinates(k, img)
        cols.append([x / scale for x in hd.coordinates(k, coords)])
    return [[cols[j][i] for j in range(len(cols))] for i in range(hd.rank(k))]


def is_isomorphism(M: list[list[Rational]], rows: int, cols: int) -> bool:
    if rows != cols:
        return False
    return rows == 0 or linalg.rank(M) == rows
