"""Intersection homology of filtered simplicial complexes, with exact integer arithmetic."""

from __future__ import annotations

from .complex import (SimplicialComplex, barycentric_subdivision, boundary_matrix, cone,
                      interval_product, join, suspension)
from .fixtures import get_action, get_fixture
from .ih import (HomologyResult, compute_ih, homology, induced_map, intersection_chain_complex,
                 is_allowable)
from .perversity import (Perversity, constant, dual, from_spec, lower_middle, top_perversity,
                         upper_middle, zero_perversity)
from .quotient import SimplicialAction, invariant_ih, quotient, regularize
from .snf import homology_ranks, smith_normal_form
from .stratification import Filtration, Stratification, stratify, validate_pseudomanifold
from .stratified import stratified_cone, stratified_product, stratified_suspension, subdivided

__version__ = "0.1.0"

__all__ = [
    "Filtration", "HomologyResult", "Perversity", "SimplicialAction", "SimplicialComplex",
    "Stratification", "barycentric_subdivision", "boundary_matrix", "compute_ih", "cone",
    "constant", "dual", "from_spec", "get_action", "get_fixture", "homology", "homology_ranks",
    "induced_map",
    "intersection_chain_complex", "interval_product", "invariant_ih", "is_allowable", "join",
    "lower_middle", "quotient", "regularize", "smith_normal_form", "stratified_cone",
    "stratified_product", "stratified_suspension", "stratify", "subdivided", "suspension",
    "top_perversity", "upper_middle", "validate_pseudomanifold", "zero_perversity",
]
