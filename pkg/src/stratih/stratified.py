"""Constructions on stratified complexes: cone, suspension, interval product
and iterated barycentric subdivision, each carrying its filtration along."""

from __future__ import annotations

from dataclasses import dataclass

from .complex import (IntervalProduct, SimplicialComplex, Subdivision, barycentric_subdivision,
                      cone, interval_product, suspension)
from .stratification import Filtration, Stratification, derive_strata


def _lift_levels(st: Stratification, Y: SimplicialComplex, level_of) -> Filtration:
    levels = [[level_of(Y.labels(s)) for s in Y.simplices(k)] for k in range(Y.dim + 1)]
    return Filtration(Y, levels, top=st.n + 1)


def stratified_cone(st: Stratification, apex="apex") -> Stratification:
    """cX with the apex as a new point stratum; every stratum S of X becomes S x (0,1)."""
    X = st.base
    C = cone(X, apex)

    def level(labels):
        rest = [v for v in labels if v != apex]
        return st.filtration.level(X.simplex(rest)) + 1 if rest else 0

    return derive_strata(_lift_levels(st, C, level))


def stratified_suspension(st: Stratification, north="north", south="south") -> Stratification:
    X = st.base
    S = suspension(X, north, south)

    def level(labels):
        rest = [v for v in labels if v not in (north, south)]
        return st.filtration.level(X.simplex(rest)) + 1 if rest else 0

    return derive_strata(_lift_levels(st, S, level))


@dataclass(frozen=True)
class StratifiedProduct:
    strat: Stratification
    product: IntervalProduct


def stratified_product(st: Stratification) -> StratifiedProduct:
    """X x I (staircase), stratified by S x I for every stratum S of X."""
    X = st.base
    ip = interval_product(X)

    def level(labels):
        return st.filtration.level(X.simplex({v for v, _ in labels})) + 1

    return StratifiedProduct(derive_strata(_lift_levels(st, ip.complex, level)), ip)


def subdivide(st: Stratification) -> tuple[Stratification, Subdivision]:
    sd = barycentric_subdivision(st.base)
    return st.subdivide(sd), sd


def subdivided(st: Stratification, times: int) -> Stratification:
    for _ in range(times):
        st, _ = subdivide(st)
    return st
