"""Finite abstract simplicial complexes and the constructions built on them.

Vertices carry opaque labels; internally every simplex is a strictly
increasing tuple of vertex indices, where index order is the canonical
label order (see :func:`label_key`).  Because of this, sorting simplices
as integer tuples is the same as sorting them lexicographically by label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

Label = Hashable
Simplex = tuple  # strictly increasing tuple of vertex indices


class ComplexError(ValueError):
    pass


class EmptyInput(ComplexError):
    pass


class DuplicateVertexInFacet(ComplexError):
    pass


class ApexCollision(ComplexError):
    pass


class LabelCollision(ComplexError):
    pass


class NotInComplex(ComplexError, KeyError):
    pass


def label_key(label):
    """Total order on the label kinds we use: ints < strings < tuples."""
    if isinstance(label, bool):
        return (0, int(label))
    if isinstance(label, int):
        return (0, label)
    if isinstance(label, str):
        return (1, label)
    if isinstance(label, tuple):
        return (2, tuple(label_key(x) for x in label))
    raise TypeError(f"unsupported vertex label {label!r}")


def render_label(label) -> str:
    """String form of a (possibly structured) label, used for JSON output."""
    if isinstance(label, tuple):
        return "(" + ",".join(render_label(x) for x in label) + ")"
    return str(label)


def faces_of(s: Simplex, k: int) -> Iterator[Simplex]:
    """All k-dimensional faces of ``s``."""
    return combinations(s, k + 1)


def facets_of(s: Simplex) -> list[Simplex]:
    return [s[:i] + s[i + 1:] for i in range(len(s))]


class SimplicialComplex:
    """Immutable finite simplicial complex.

    ``simplices(k)`` lists the k-simplices in canonical order and
    ``position(s)`` gives the index of ``s`` inside that list.
    """

    __slots__ = ("name", "vertices", "_vindex", "_faces", "_pos", "facets", "_ftab")

    def __init__(self, vertices: Sequence[Label], faces: list[list[Simplex]],
                 facets: Sequence[Simplex], name: str = ""):
        self.name = name
        self.vertices = tuple(vertices)
        self._vindex = {v: i for i, v in enumerate(self.vertices)}
        self._faces = [tuple(sorted(f)) for f in faces]
        self._pos = [{s: i for i, s in enumerate(f)} for f in self._faces]
        self.facets = tuple(sorted(facets))
        self._ftab: dict = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[Label]], name: str = "") -> "SimplicialComplex":
        facets = [list(f) for f in facets]
        if not facets:
            raise EmptyInput("facet list is empty")
        labels = set()
        for f in facets:
            if not f:
                raise EmptyInput("empty facet")
            if len(set(f)) != len(f):
                raise DuplicateVertexInFacet(f"facet {f!r} repeats a vertex")
            labels.update(f)
        vertices = sorted(labels, key=label_key)
        index = {v: i for i, v in enumerate(vertices)}
        return cls.from_index_facets(
            vertices, [tuple(sorted(index[v] for v in f)) for f in facets], name=name)

    @classmethod
    def from_index_facets(cls, vertices: Sequence[Label], facets: Iterable[Simplex],
                          name: str = "") -> "SimplicialComplex":
        """Closure of index-tuple facets; vertex indices must follow label order."""
        tops = sorted(set(facets), key=len, reverse=True)
        dim = len(tops[0]) - 1
        layers: list[set] = [set() for _ in range(dim + 1)]
        maximal = []
        for s in tops:
            k = len(s) - 1
            if s in layers[k]:
                continue  # face of a larger facet already closed
            maximal.append(s)
            layers[k].add(s)
            for j in range(k):
                layers[j].update(combinations(s, j + 1))
        return cls(vertices, [list(l) for l in layers], maximal, name=name)

    @classmethod
    def from_layers(cls, vertices: Sequence[Label], layers: list[list[Simplex]],
                    name: str = "", facets: Sequence[Simplex] | None = None) -> "SimplicialComplex":
        """Trusted fast path: ``layers[k]`` already lists every k-simplex."""
        if facets is None:
            cofaced = set()
            for k in range(1, len(layers)):
                for s in layers[k]:
                    cofaced.update(facets_of(s))
            facets = [s for layer in layers for s in layer if s not in cofaced]
        return cls(vertices, layers, facets, name=name)

    # -- queries ----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self._faces) - 1

    def simplices(self, k: int) -> tuple:
        if 0 <= k < len(self._faces):
            return self._faces[k]
        return ()

    def facet_table(self, k: int) -> tuple:
        """Positions of the codim-1 faces of every k-simplex, in boundary order (cached)."""
        t = self._ftab.get(k)
        if t is None:
            pos = self._pos[k - 1] if k >= 1 else {}
            t = tuple(tuple(pos[s[:i] + s[i + 1:]] for i in range(len(s))) if k >= 1 else ()
                      for s in self.simplices(k))
            self._ftab[k] = t
        return t

    def all_simplices(self) -> Iterator[Simplex]:
        for layer in self._faces:
            yield from layer

    def position(self, s: Simplex) -> int:
        try:
            return self._pos[len(s) - 1][s]
        except (KeyError, IndexError):
            raise NotInComplex(f"{s!r} is not a simplex of {self.name or 'the complex'}") from None

    def __contains__(self, s) -> bool:
        if not isinstance(s, tuple):
            return False
        k = len(s) - 1
        return 0 <= k < len(self._pos) and s in self._pos[k]

    def __len__(self) -> int:
        return sum(len(l) for l in self._faces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.canonical_facets() == other.canonical_facets()

    def __hash__(self):
        return hash(tuple(self.canonical_facets()))

    def __repr__(self) -> str:
        return f"SimplicialComplex({self.name!r}, f={self.f_vector()})"

    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(l) for l in self._faces)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.f_vector()))

    def vertex_index(self, label: Label) -> int:
        try:
            return self._vindex[label]
        except KeyError:
            raise NotInComplex(f"no vertex labelled {label!r}") from None

    def simplex(self, labels: Iterable[Label]) -> Simplex:
        """Index simplex for a collection of vertex labels (must be in the complex)."""
        s = tuple(sorted(self.vertex_index(v) for v in labels))
        if s not in self:
            raise NotInComplex(f"{tuple(labels)!r} is not a simplex")
        return s

    def labels(self, s: Simplex) -> tuple:
        return tuple(self.vertices[i] for i in s)

    def canonical_facets(self) -> list[tuple]:
        return sorted((self.labels(f) for f in self.facets),
                      key=lambda t: [label_key(x) for x in t])

    def is_subcomplex_set(self, simplices: Iterable[Simplex]) -> bool:
        sset = set(simplices)
        return all(s in self and all(f in sset for f in facets_of(s) if f) for s in sset)

    def closure(self, simplices: Iterable[Simplex]) -> set:
        """All faces of the given simplices."""
        out = set()
        for s in simplices:
            if s in out:
                continue
            for j in range(len(s)):
                out.update(combinations(s, j + 1))
        return out

    def subcomplex(self, simplices: Iterable[Simplex], name: str = "") -> "SimplicialComplex":
        """Subcomplex generated by index simplices, keeping this complex's labels."""
        closed = self.closure(simplices)
        if not closed:
            raise EmptyInput("empty subcomplex")
        used = sorted({v for s in closed for v in s})
        renum = {v: i for i, v in enumerate(used)}
        return SimplicialComplex.from_index_facets(
            [self.vertices[v] for v in used],
            [tuple(renum[v] for v in s) for s in closed], name=name)

    def components(self) -> list[set]:
        """Vertex-index sets of the connected components."""
        parent = list(range(len(self.vertices)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in self.simplices(1):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        comps: dict[int, set] = {}
        for v in range(len(self.vertices)):
            comps.setdefault(find(v), set()).add(v)
        return sorted(comps.values(), key=min)

    def to_json(self) -> dict:
        return {"name": self.name,
                "facets": [[render_label(v) for v in f] for f in self.canonical_facets()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "SimplicialComplex":
        return cls.from_facets([[str(v) for v in f] for f in data["facets"]],
                               name=data.get("name", ""))


def build_complex(facets: Iterable[Iterable[Label]], name: str = "") -> SimplicialComplex:
    return SimplicialComplex.from_facets(facets, name=name)


# -- chains -----------------------------------------------------------------


@dataclass
class Chain:
    """Integer chain: simplex -> nonzero coefficient, all of one degree."""

    degree: int
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coefficients = {s: c for s, c in self.coefficients.items() if c}
        for s in self.coefficients:
            if len(s) != self.degree + 1:
                raise ComplexError(f"{s!r} has wrong dimension for a {self.degree}-chain")

    def support(self) -> set:
        return set(self.coefficients)

    def __add__(self, other: "Chain") -> "Chain":
        out = dict(self.coefficients)
        for s, c in other.coefficients.items():
            out[s] = out.get(s, 0) + c
        return Chain(self.degree, out)

    def __neg__(self) -> "Chain":
        return Chain(self.degree, {s: -c for s, c in self.coefficients.items()})

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def __mul__(self, k: int) -> "Chain":
        return Chain(self.degree, {s: k * c for s, c in self.coefficients.items()})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.coefficients)


def boundary_dict(coeffs: Mapping[Simplex, int]) -> dict:
    out: dict = {}
    for s, c in coeffs.items():
        if len(s) == 1:
            continue
        sign = c
        for i in range(len(s)):
            f = s[:i] + s[i + 1:]
            v = out.get(f, 0) + sign
            if v:
                out[f] = v
            else:
                out.pop(f, None)
            sign = -sign
    return out


def boundary(chain: Chain) -> Chain:
    """Simplicial boundary with signs by vertex position."""
    if chain.degree == 0:
        return Chain(-1, {})
    return Chain(chain.degree - 1, boundary_dict(chain.coefficients))


def boundary_matrix(X: SimplicialComplex, k: int) -> list[dict]:
    """Column-sparse boundary from degree k to k-1: one {row: coeff} per k-simplex."""
    if k <= 0:
        return [dict() for _ in X.simplices(k)]
    cols = []
    for faces in X.facet_table(k):
        col = {}
        sign = 1
        for q in faces:
            col[q] = sign
            sign = -sign
        cols.append(col)
    return cols


# -- constructions ----------------------------------------------------------


def _relabelled(vertices: Sequence[Label], facets_as_labels: Iterable[tuple], name: str) -> SimplicialComplex:
    vs = sorted(set(vertices), key=label_key)
    index = {v: i for i, v in enumerate(vs)}
    return SimplicialComplex.from_index_facets(
        vs, [tuple(sorted(index[v] for v in f)) for f in facets_as_labels], name=name)


def cone(X: SimplicialComplex, apex: Label = "apex", name: str = "") -> SimplicialComplex:
    if apex in X._vindex:
        raise ApexCollision(f"apex {apex!r} already a vertex")
    facets = [X.labels(f) + (apex,) for f in X.facets]
    return _relabelled(list(X.vertices) + [apex], facets, name or f"c({X.name})")


def suspension(X: SimplicialComplex, north: Label = "north", south: Label = "south",
               name: str = "") -> SimplicialComplex:
    if north == south or north in X._vindex or south in X._vindex:
        raise ApexCollision("suspension points must be fresh and distinct")
    facets = [X.labels(f) + (p,) for f in X.facets for p in (north, south)]
    return _relabelled(list(X.vertices) + [north, south], facets, name or f"S({X.name})")


def join(X: SimplicialComplex, Y: SimplicialComplex, name: str = "") -> SimplicialComplex:
    if set(X.vertices) & set(Y.vertices):
        raise LabelCollision("join factors share vertex labels")
    facets = [X.labels(a) + Y.labels(b) for a in X.facets for b in Y.facets]
    return _relabelled(list(X.vertices) + list(Y.vertices), facets, name or f"{X.name}*{Y.name}")


@dataclass(frozen=True)
class IntervalProduct:
    """Staircase triangulation of X x [0,1] with its structure maps (vertex maps on labels)."""

    complex: SimplicialComplex
    bottom: dict
    top: dict
    projection: dict


def interval_product(X: SimplicialComplex, name: str = "") -> IntervalProduct:
    facets = []
    for f in X.facets:
        labels = X.labels(f)
        for i in range(len(labels)):
            facets.append(tuple((v, 0) for v in labels[: i + 1]) + tuple((v, 1) for v in labels[i:]))
    vertices = [(v, t) for v in X.vertices for t in (0, 1)]
    P = _relabelled(vertices, facets, name or f"{X.name}xI")
    return IntervalProduct(
        P,
        bottom={v: (v, 0) for v in X.vertices},
        top={v: (v, 1) for v in X.vertices},
        projection={(v, t): v for v in X.vertices for t in (0, 1)},
    )


@dataclass(frozen=True)
class Subdivision:
    """Barycentric subdivision; ``carrier[i]`` is the original simplex of new vertex i."""

    complex: SimplicialComplex
    carrier: tuple
    original: SimplicialComplex


def barycentric_subdivision(X: SimplicialComplex, name: str = "") -> Subdivision:
    all_s = list(X.all_simplices())
    labels = [X.labels(s) for s in all_s]
    # label_key of a tuple label, built from the (cached) keys of its vertices
    vkey = [label_key(v) for v in X.vertices]
    keys = [(2, tuple(vkey[v] for v in s)) for s in all_s]
    order = sorted(range(len(all_s)), key=keys.__getitem__)
    new_index = {all_s[i]: j for j, i in enumerate(order)}
    carrier = tuple(all_s[i] for i in order)
    maximal = set(X.facets)
    # flags ending at each simplex, as lists of new-vertex indices in flag order
    chains: dict = {}
    layers: list[list] = [[] for _ in range(X.dim + 1)]
    facets: list = []
    for k in range(X.dim + 1):
        for s in X.simplices(k):
            me = new_index[s]
            mine = [(me,)]
            if k:
                for j in range(k):
                    for f in combinations(s, j + 1):
                        mine.extend(c + (me,) for c in chains[f])
            chains[s] = mine
            top = s in maximal
            for c in mine:
                t = tuple(sorted(c))
                layers[len(c) - 1].append(t)
                if top and len(c) == k + 1:
                    facets.append(t)
    sd = SimplicialComplex.from_layers([labels[i] for i in order], layers,
                                       name=name or f"sd({X.name})", facets=facets)
    return Subdivision(sd, carrier, X)
