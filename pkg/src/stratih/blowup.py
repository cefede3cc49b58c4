"""Linear blow-up of a decomposed simplex (times a prism factor).

A decomposition Delta = D_0 * D_1 * ... * D_k is blown up to

    (P x cD_0) x (D_1 * ... * D_k),   L(x, [x0, t0], y) = (x, t0 x0 + (1 - t0) y)

Points of the closed cone cD_0 are written z = t0 x0 (so z >= 0, sum z <= 1):
the cone point is z = 0 and the collapsed face t0 = 1 is sum z = 1.  All
coordinates are exact Fractions; the prism P is a product of simplices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from .rational import Rational as Fraction
from itertools import combinations, product
from typing import Iterator, Sequence

from .stratification import Stratification

ZERO = Fraction(0)
ONE = Fraction(1)


class NotFiltered(ValueError):
    pass


class ZeroDepth(ValueError):
    pass


@dataclass(frozen=True)
class DecomposedSimplex:
    """Ordered blocks of vertices, Delta = blocks[0] * ... * blocks[k]."""

    blocks: tuple

    def __post_init__(self):
        seen = [v for b in self.blocks for v in b]
        if not self.blocks or any(not b for b in self.blocks):
            raise ValueError("blocks must be nonempty")
        if len(set(seen)) != len(seen):
            raise ValueError("blocks must be disjoint")

    @property
    def depth(self) -> int:
        return len(self.blocks) - 1

    @property
    def vertices(self) -> tuple:
        return tuple(v for b in self.blocks for v in b)

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


def decompose_from_filtration(sigma, st: Stratification) -> DecomposedSimplex:
    """Blocks of a simplex read off where its trace on the skeleta jumps."""
    X, f = st.base, st.filtration
    s = sigma if isinstance(sigma, tuple) and sigma in X else X.simplex(sigma)
    blocks = []
    previous: tuple = ()
    for i in range(f.top + 1):
        trace = tuple(v for v in s if f.level((v,)) <= i)
        if trace and f.level(trace) > i:
            raise NotFiltered(
                f"{X.labels(s)} meets B_{i} in more than one face "
                f"(vertices {X.labels(trace)} do not span a simplex of B_{i}); subdivide first")
        if trace != previous:
            blocks.append(tuple(X.vertices[v] for v in trace if v not in previous))
            previous = trace
    if f.level(s) < f.top:
        raise NotFiltered(f"{X.labels(s)} lies in the singular part; its regular part is empty")
    return DecomposedSimplex(tuple(blocks))


# -- points and cells ------------------------------------------------------------------


Point = tuple  # (x: tuple of dicts per prism factor, z: dict, y: dict)


def _clean(d: dict) -> dict:
    return {k: v for k, v in d.items() if v}


@dataclass(frozen=True)
class Cell:
    """(P x cC) x J for prism factors P, cone vertices C (maybe empty) and
    join vertices J.  With C empty the cell is P x J and L is the identity."""

    prism: tuple  # tuple of vertex-name tuples, one per simplex factor
    cone: tuple
    join: tuple

    def evaluate(self, p: Point) -> tuple:
        """L(x, z, y) = (x, z + (1 - sum z) y) in barycentric coordinates of P x Delta."""
        x, z, y = p
        s = ONE - sum(z.values(), ZERO)
        w = dict(z)
        for v, c in y.items():
            w[v] = s * c
        return tuple(_clean(d) for d in x), _clean(w)

    def facets(self) -> list[tuple]:
        out = [("P", f, v) for f, fac in enumerate(self.prism) if len(fac) >= 2 for v in fac]
        out += [("cone", v) for v in self.cone]
        if self.cone and self.join:
            out.append(("top",))
        if len(self.join) >= 2:
            out += [("join", v) for v in self.join]
        return out

    def on_facet(self, facet: tuple, p: Point) -> bool:
        x, z, y = p
        kind = facet[0]
        if kind == "P":
            return not x[facet[1]].get(facet[2], 0)
        if kind == "cone":
            return not z.get(facet[1], 0)
        if kind == "top":
            return sum(z.values(), ZERO) == 1
        return not y.get(facet[1], 0)

    def facet_cell(self, facet: tuple) -> "Cell":
        kind = facet[0]
        if kind == "P":
            prism = tuple(tuple(v for v in fac if v != facet[2]) if f == facet[1] else fac
                          for f, fac in enumerate(self.prism))
            return Cell(prism, self.cone, self.join)
        if kind == "cone":
            return Cell(self.prism, tuple(v for v in self.cone if v != facet[1]), self.join)
        if kind == "join":
            return Cell(self.prism, self.cone, tuple(v for v in self.join if v != facet[1]))
        raise ValueError("the collapsed face is not a blow-up cell")

    def sample(self, rng: random.Random, facet: tuple | None = None, boundary: bool = False) -> Point:
        """Exact rational point in the relative interior of the cell or of one facet.
        With ``boundary`` some coordinates are randomly zeroed (closed cell)."""
        def simplex_point(names, drop=None):
            vals = {v: Fraction(rng.randint(1, 97)) for v in names if v != drop}
            if boundary and len(vals) > 1:
                for v in list(vals):
                    if rng.random() < 0.3 and len(vals) > 1:
                        del vals[v]
            tot = sum(vals.values())
            return {v: c / tot for v, c in vals.items()}

        kind = facet[0] if facet else None
        x = tuple(simplex_point(fac, facet[2] if kind == "P" and facet[1] == f else None)
                  for f, fac in enumerate(self.prism))
        cone = [v for v in self.cone if not (kind == "cone" and facet[1] == v)]
        if cone:
            raw = {v: Fraction(rng.randint(1, 97)) for v in cone}
            if boundary:
                raw = {v: c for v, c in raw.items() if rng.random() > 0.3} or raw
            tot = sum(raw.values())
            if kind == "top" or (boundary and rng.random() < 0.2):
                scale = ONE
            elif boundary and rng.random() < 0.2:
                scale = ZERO
            else:
                scale = Fraction(rng.randint(1, 96), 97)
            z = {v: c * scale / tot for v, c in raw.items() if c * scale}
        else:
            z = {}
        y = simplex_point(self.join, facet[1] if kind == "join" else None) if self.join else {}
        return x, z, y

    def restrict(self, facet: tuple, p: Point) -> Point:
        """Coordinates of a point of a facet in the facet's own cell."""
        x, z, y = p
        kind = facet[0]
        if kind == "P":
            x = tuple({k: v for k, v in d.items() if k != facet[2]} if f == facet[1] else d
                      for f, d in enumerate(x))
        elif kind == "cone":
            z = {k: v for k, v in z.items() if k != facet[1]}
        elif kind == "join":
            y = {k: v for k, v in y.items() if k != facet[1]}
        return x, z, y

    def invert(self, target: tuple) -> Point:
        """A preimage of a point of P x Delta (the unique one off the collapsed face)."""
        x, w = target
        z = {v: w[v] for v in self.cone if w.get(v)}
        s = ONE - sum(z.values(), ZERO)
        if s:
            y = {v: w[v] / s for v in self.join if w.get(v)}
        else:
            y = {v: ONE / len(self.join) for v in self.join}
        return tuple(dict(d) for d in x), z, y


def _target_facets(prism: tuple, vertices: tuple) -> list[tuple]:
    out = [("P", f, v) for f, fac in enumerate(prism) if len(fac) >= 2 for v in fac]
    if len(vertices) >= 2:
        out += [("simplex", v) for v in vertices]
    return out


def _in_target_facet(facet: tuple, q: tuple) -> bool:
    x, w = q
    if facet[0] == "P":
        return not x[facet[1]].get(facet[2], 0)
    return not w.get(facet[1], 0)


@dataclass(frozen=True)
class BlowupCell:
    decomposition: DecomposedSimplex
    prism: tuple
    cell: Cell

    @property
    def depth(self) -> int:
        return self.decomposition.depth - 1

    @property
    def remaining(self) -> DecomposedSimplex:
        """D_1 * ... * D_k, the decomposition left after blowing up D_0."""
        return DecomposedSimplex(self.decomposition.blocks[1:])

    def L(self, p: Point) -> tuple:
        return self.cell.evaluate(p)


def blow_up(d: DecomposedSimplex, prism: Sequence[Sequence] = ()) -> BlowupCell:
    if d.depth < 1:
        raise ZeroDepth("a decomposition of depth 0 has nothing to blow up")
    prism = tuple(tuple(f) for f in prism)
    cell = Cell(prism, tuple(d.blocks[0]), tuple(v for b in d.blocks[1:] for v in b))
    return BlowupCell(d, prism, cell)


# -- boundary identity ----------------------------------------------------------------------


@dataclass
class BoundaryReport:
    decomposition: DecomposedSimplex
    prism: tuple
    t1: dict  # facet of P x Delta -> facet of the blow-up
    t2: tuple
    blowup_facets: list
    target_facets: list
    collapsed_is_t1: bool
    restriction_commutes: bool
    t2_is_projection: bool

    @property
    def holds(self) -> bool:
        images = list(self.t1.values())
        distinct = len(set(images)) == len(images)
        if self.collapsed_is_t1:
            # bijective case: the extra face is the blow-up of the face D_0
            covered = set(images) == set(self.blowup_facets)
        else:
            covered = sorted(images + [self.t2]) == sorted(self.blowup_facets)
        return distinct and covered and self.restriction_commutes and self.t2_is_projection

    @property
    def counts(self) -> tuple[int, int]:
        return len(self.blowup_facets), len(self.target_facets)


def boundary_faces(b: BlowupCell, samples: int = 10, seed: int = 0) -> BoundaryReport:
    """Derive the T1 correspondence from sampled points and check it.

    For each facet tau of the blow-up the images L(tau) are tested against
    each facet G of P x Delta; tau is the T1 face of G when L(tau) lies in
    G and tau is not the collapsed face.  The restriction of L to tau is
    then compared with the blow-up of G evaluated on tau's own coordinates.
    """
    rng = random.Random(seed)
    cell = b.cell
    vertices = b.decomposition.vertices
    targets = _target_facets(b.prism, vertices)
    facets = cell.facets()
    pts = {tau: [cell.sample(rng, tau) for _ in range(samples)] for tau in facets}
    imgs = {tau: [cell.evaluate(p) for p in pts[tau]] for tau in facets}
    t2 = ("top",)
    t1: dict = {}
    commutes = True
    collapsed = False
    for G in targets:
        inside = [tau for tau in facets if all(_in_target_facet(G, q) for q in imgs[tau])]
        proper = [tau for tau in inside if tau != t2]
        if len(proper) == 1:
            t1[G] = proper[0]
        elif not proper and t2 in inside:
            t1[G] = t2
            collapsed = True
            continue
        else:
            commutes = False
            continue
        sub = cell.facet_cell(proper[0])
        for p, q in zip(pts[proper[0]], imgs[proper[0]]):
            if sub.evaluate(cell.restrict(proper[0], p)) != q:
                commutes = False
    projection = all(q == (tuple(_clean(d) for d in p[0]), _clean(dict(p[1])))
                     for p, q in zip(pts[t2], imgs[t2]))
    return BoundaryReport(b.decomposition, b.prism, t1, t2, facets, targets, collapsed,
                          commutes, projection)


# -- L spot checks ------------------------------------------------------------------------------


@dataclass
class MapChecks:
    injective_interior: bool
    surjective: bool
    interior_preimage: bool
    bijective_closed: bool | None  # only asserted when k = 1 and dim D_1 = 0
    collapse_witness: tuple | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return (self.injective_interior and self.surjective and self.interior_preimage
                and self.bijective_closed is not False)


def _interior(cell: Cell, p: Point) -> bool:
    x, z, y = p
    return (all(len(d) == len(fac) for d, fac in zip(x, cell.prism))
            and len(z) == len(cell.cone) and sum(z.values(), ZERO) < 1
            and len(y) == len(cell.join))


def check_map(b: BlowupCell, samples: int = 10, seed: int = 0) -> MapChecks:
    rng = random.Random(seed)
    cell = b.cell
    inj = surj = pre = True
    for _ in range(samples):
        p = cell.sample(rng)
        q = cell.evaluate(p)
        if cell.invert(q) != p:
            inj = False
        if not all(len(d) == len(fac) for d, fac in zip(q[0], cell.prism)) or \
                len(q[1]) != len(b.decomposition.vertices):
            pre = False
        # closed target point, with some coordinates zeroed
        t = cell.evaluate(cell.sample(rng, boundary=True))
        r = cell.invert(t)
        if cell.evaluate(r) != t:
            surj = False
    # interior of the target pulls back to the interior of the blow-up
    for _ in range(samples):
        q = cell.evaluate(cell.sample(rng))
        if not _interior(cell, cell.invert(q)):
            pre = False
    bij = None
    witness = None
    blocks = b.decomposition.blocks
    if len(blocks) == 2 and len(blocks[1]) == 1:
        bij = True
        for _ in range(samples):
            p = cell.sample(rng, boundary=True)
            if cell.invert(cell.evaluate(p)) != p:
                bij = False
    elif len(cell.join) >= 2:
        # two points of the collapsed face with different y share an image
        p = cell.sample(rng, ("top",))
        y2 = dict(p[2])
        keys = sorted(y2, key=repr)
        if len(keys) >= 2:
            a, c = keys[0], keys[1]
            y2[a], y2[c] = y2[c], y2[a]
            if y2 != p[2]:
                p2 = (p[0], p[1], y2)
                if cell.evaluate(p) == cell.evaluate(p2):
                    witness = (p, p2)
    return MapChecks(inj, surj, pre, bij, witness)


# -- barycentric subdivision compatibility -----------------------------------------------------


@dataclass
class SubdivisionWitness:
    flag: tuple  # faces of Delta, increasing
    blocks: tuple  # induced decomposition of nabla, faces grouped by level
    commutes: bool
    regular_parts_agree: bool
    samples: int


def _barycenter(face: Sequence) -> dict:
    return {v: Fraction(1, len(face)) for v in face}


def subdivision_compatibility(d: DecomposedSimplex, flag: Sequence[Sequence],
                              prism: Sequence[Sequence] = (), samples: int = 10,
                              seed: int = 0) -> SubdivisionWitness:
    """Check I o L_nabla = L_Delta o I for the simplex nabla of the barycentric
    subdivision spanned by the barycenters of ``flag``.

    I on blow-ups is written explicitly: with alpha_u the share of F_u in D_0,
    z = (w restricted to D_0) and y = sum y'_u b(F_u)|_J / (1 - sum y'_u alpha_u),
    which stays finite on the collapsed face of nabla's blow-up.
    """
    rng = random.Random(seed)
    flag = tuple(tuple(F) for F in flag)
    for a, c in zip(flag, flag[1:]):
        if not set(a) < set(c):
            raise ValueError("flag must be strictly increasing")
    levels = []
    acc: set = set()
    for blk in d.blocks:
        acc |= set(blk)
        levels.append(frozenset(acc))

    def level(F):
        return next(i for i, E in enumerate(levels) if set(F) <= E)

    groups: dict[int, list] = {}
    for F in flag:
        groups.setdefault(level(F), []).append(F)
    blocks = tuple(tuple(groups[i]) for i in sorted(groups))
    names = {F: f"b{j}" for j, F in enumerate(flag)}
    cone_faces = tuple(F for F in flag if level(F) == 0)
    rest = tuple(F for F in flag if level(F) > 0)
    prism = tuple(tuple(f) for f in prism)
    nabla = Cell(prism, tuple(names[F] for F in cone_faces), tuple(names[F] for F in rest))
    big = Cell(prism, tuple(d.blocks[0]), tuple(v for blk in d.blocks[1:] for v in blk))
    D0 = set(d.blocks[0])

    def embed(x, w_nabla) -> tuple:
        w: dict = {}
        for F in flag:
            c = w_nabla.get(names[F], 0)
            if c:
                for v, bc in _barycenter(F).items():
                    w[v] = w.get(v, 0) + c * bc
        return tuple(_clean(dict(e)) for e in x), _clean(w)

    def lift(p: Point) -> Point:
        x, zp, yp = p
        s = ONE - sum(zp.values(), ZERO)
        w: dict = {}
        for F in cone_faces:
            c = zp.get(names[F], 0)
            for v, bc in _barycenter(F).items():
                w[v] = w.get(v, 0) + c * bc
        num: dict = {}
        denom = ONE
        for F in rest:
            c = yp.get(names[F], 0)
            if not c:
                continue
            denom -= c * Fraction(len(set(F) & D0), len(F))
            for v, bc in _barycenter(F).items():
                if v in D0:
                    w[v] = w.get(v, 0) + s * c * bc
                else:
                    num[v] = num.get(v, 0) + c * bc
        z = {v: w[v] for v in big.cone if w.get(v)}
        y = {v: c / denom for v, c in num.items() if c}
        return tuple(dict(e) for e in x), z, y

    commutes = True
    for i in range(samples):
        kind = i % 3
        if kind == 0:
            p = nabla.sample(rng)
        elif kind == 1 and nabla.cone and nabla.join:
            p = nabla.sample(rng, ("top",))
        else:
            p = nabla.sample(rng, boundary=True)
        left = embed(p[0], nabla.evaluate(p)[1])
        right = big.evaluate(lift(p))
        if left != right:
            commutes = False

    top_level = d.depth
    agree = True
    for _ in range(samples):
        lam = {names[F]: Fraction(rng.randint(0, 9)) for F in flag}
        tot = sum(lam.values())
        if not tot:
            continue
        lam = {k: v / tot for k, v in lam.items()}
        _, w = embed((), lam)
        in_delta = any(w.get(v) for v in d.blocks[-1])
        in_nabla = any(lam[names[F]] for F in flag if level(F) == top_level)
        if in_delta != in_nabla:
            agree = False
    return SubdivisionWitness(flag, blocks, commutes, agree, samples)


# -- enumeration ------------------------------------------------------------------------------


def ordered_partitions(items: Sequence) -> Iterator[tuple]:
    """All ordered set partitions into nonempty blocks (each block sorted)."""
    items = tuple(items)
    if not items:
        yield ()
        return
    n = len(items)
    for labels in product(range(n), repeat=n):
        used = sorted(set(labels))
        if used != list(range(len(used))):
            continue
        yield tuple(tuple(items[i] for i in range(n) if labels[i] == b) for b in used)


def decompositions(d: int, min_depth: int = 1) -> Iterator[DecomposedSimplex]:
    for blocks in ordered_partitions(tuple(range(d + 1))):
        if len(blocks) - 1 >= min_depth:
            yield DecomposedSimplex(blocks)


def full_flags(vertices: Sequence) -> Iterator[tuple]:
    """Maximal flags of faces (top simplices of the barycentric subdivision)."""
    from itertools import permutations
    for perm in permutations(vertices):
        yield tuple(tuple(sorted(perm[: i + 1])) for i in range(len(perm)))


def all_flags(vertices: Sequence) -> Iterator[tuple]:
    faces = [tuple(c) for r in range(1, len(vertices) + 1) for c in combinations(sorted(vertices), r)]

    def extend(chain):
        yield chain
        last = set(chain[-1]) if chain else set()
        for F in faces:
            if last < set(F) and (not chain or len(F) > len(chain[-1])):
                yield from extend(chain + (F,))

    for F in faces:
        yield from extend((F,))
