"""Perversities: integer values on the singular strata of a stratification."""

from __future__ import annotations

from typing import Callable, Mapping

from .complex import render_label
from .stratification import Stratification


class MissingApexValue(ValueError):
    pass


class PerversityNotDefined(ValueError):
    pass


class Perversity:
    """Values keyed by stratum index; regular strata carry ``None``."""

    __slots__ = ("strat", "values", "name")

    def __init__(self, strat: Stratification, values: Mapping[int, int], name: str = ""):
        missing = [i for i in strat.singular if i not in values]
        if missing:
            raise PerversityNotDefined(
                f"no value for singular strata {[strat.strata[i].id for i in missing]}")
        self.strat = strat
        self.values = tuple(int(values[i]) if strat.is_singular(i) else None
                            for i in range(len(strat.strata)))
        self.name = name

    def __getitem__(self, key) -> int:
        i = self.strat.index(key) if isinstance(key, str) else key
        v = self.values[i]
        if v is None:
            raise KeyError(f"stratum {self.strat.strata[i].id} is regular")
        return v

    def as_dict(self) -> dict[str, int]:
        return {self.strat.strata[i].id: self.values[i] for i in self.strat.singular}

    def __repr__(self) -> str:
        return f"Perversity({self.name or self.as_dict()})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Perversity) and self.as_dict() == other.as_dict()

    def __le__(self, other: "Perversity") -> bool:
        return all(a is None or a <= b for a, b in zip(self.values, other.values))

    def on(self, strat: Stratification) -> "Perversity":
        """Same values on a stratification with identical strata (e.g. a subdivision)."""
        return Perversity(strat, dict(enumerate(self.values)), self.name)

    def in_gm_range(self) -> bool:
        """0 <= p(S) <= codim S - 2 on every singular stratum."""
        return all(0 <= self.values[i] <= self.strat.codim(i) - 2 for i in self.strat.singular)

    def shifted(self, delta: int) -> "Perversity":
        return Perversity(self.strat, {i: self.values[i] + delta for i in self.strat.singular})

    def to_json(self):
        return self.name if self.name in ("zero", "top", "lower-middle", "upper-middle") else self.as_dict()


def _by_codim(strat: Stratification, rule: Callable[[int], int], name: str) -> Perversity:
    return Perversity(strat, {i: rule(strat.codim(i)) for i in strat.singular}, name)


def zero_perversity(strat: Stratification) -> Perversity:
    return _by_codim(strat, lambda c: 0, "zero")


def top_perversity(strat: Stratification) -> Perversity:
    return _by_codim(strat, lambda c: c - 2, "top")


def lower_middle(strat: Stratification) -> Perversity:
    return _by_codim(strat, lambda c: (c - 2) // 2, "lower-middle")


def upper_middle(strat: Stratification) -> Perversity:
    return _by_codim(strat, lambda c: (c - 1) // 2, "upper-middle")


def constant(strat: Stratification, value: int) -> Perversity:
    return _by_codim(strat, lambda c: value, f"const({value})")


def dual(p: Perversity) -> Perversity:
    """q(S) = codim S - 2 - p(S)."""
    st = p.strat
    names = {"zero": "top", "top": "zero", "lower-middle": "upper-middle",
             "upper-middle": "lower-middle"}
    return Perversity(st, {i: st.codim(i) - 2 - p.values[i] for i in st.singular},
                      names.get(p.name, ""))


NAMED = {"zero": zero_perversity, "top": top_perversity,
         "lower-middle": lower_middle, "upper-middle": upper_middle}


def from_spec(strat: Stratification, spec) -> Perversity:
    """``"zero" | "top" | "lower-middle" | "upper-middle" | {stratum-id: int}``.

    Dictionary keys may also be ``"@label"``, meaning the stratum containing
    that vertex.
    """
    if isinstance(spec, str):
        try:
            return NAMED[spec](strat)
        except KeyError:
            raise ValueError(f"unknown perversity {spec!r}") from None
    values = {}
    for key, v in spec.items():
        i = strat.stratum_containing([_label(strat, key[1:])]) if key.startswith("@") \
            else strat.index(key)
        values[i] = int(v)
    return Perversity(strat, values)


def _label(strat: Stratification, text: str):
    """Vertex label whose rendered form is ``text`` (labels may be ints or tuples)."""
    for v in strat.base.vertices:
        if v == text or render_label(v) == text:
            return v
    return text


# -- transport along constructions --------------------------------------------


def transport(p: Perversity, target: Stratification,
              source_stratum: Callable[[int], int | None],
              extra: Mapping[int, int] | None = None) -> Perversity:
    """p(S') = p(S) where S is the source stratum corresponding to S'.

    ``source_stratum`` returns None for target strata with no source; those
    must be given in ``extra``.
    """
    extra = dict(extra or {})
    values = {}
    for j in target.singular:
        if j in extra:
            values[j] = extra[j]
            continue
        i = source_stratum(j)
        if i is None:
            raise MissingApexValue(f"no value supplied for new stratum {target.strata[j].id}")
        v = p.values[i]
        if v is None:
            raise PerversityNotDefined(
                f"{target.strata[j].id} is singular but its source {p.strat.strata[i].id} is regular")
        values[j] = v
    return Perversity(target, values)


def transport_cone(p: Perversity, cone_strat: Stratification, apex, apex_value: int | None) -> Perversity:
    X = p.strat.base
    C = cone_strat.base
    a = C.vertex_index(apex)
    apex_stratum = cone_strat.stratum_containing([apex])

    def source(j):
        if j == apex_stratum:
            return None
        s = cone_strat.strata[j].simplices[0]
        rest = [C.vertices[v] for v in s if v != a]
        return p.strat.stratum_containing(rest)

    extra = {apex_stratum: apex_value} if apex_value is not None else {}
    return transport(p, cone_strat, source, extra)


def transport_product(p: Perversity, product_strat: Stratification) -> Perversity:
    P = product_strat.base

    def source(j):
        s = product_strat.strata[j].simplices[0]
        return p.strat.stratum_containing({P.vertices[v][0] for v in s})

    return transport(p, product_strat, source)


def transport_restrict(p: Perversity, sub: Stratification, parent: Mapping[int, int]) -> Perversity:
    return transport(p, sub, parent.__getitem__)


def transport_along(p: Perversity, target: Stratification, kind: str, **context) -> Perversity:
    """Dispatch by construction kind: cone, interval-product, restrict, quotient."""
    if kind == "cone":
        return transport_cone(p, target, context["apex"], context.get("apex_value"))
    if kind == "interval-product":
        return transport_product(p, target)
    if kind == "restrict":
        return transport_restrict(p, target, context["parent"])
    if kind == "quotient":
        from .quotient import transport_to_quotient
        return transport_to_quotient(p, target, context["quotient"])
    raise ValueError(f"unknown transport kind {kind!r}")
