"""Explicit representations of extension modules over canonical algebras."""

from .builder import (assemble_map, build, classify, closed_form_A, closed_form_B3, cokernel,
                      higher_rank, line_bundle_rep, power_map, reduce_datum, verify_C_conditions)
from .grading import GroupElement, WeightSpec, make_element, parse_element, structure_elements
from .quiver import (Morphism, Representation, are_isomorphic, build_quiver, ext1_dim, hom_basis,
                     hom_dim, is_exceptional, validate)
from .sheaf import CokernelDatum, ExtensionDatum, validate_extension_datum

__all__ = [
    "assemble_map", "build", "classify", "closed_form_A", "closed_form_B3", "cokernel",
    "higher_rank", "line_bundle_rep", "power_map", "reduce_datum", "verify_C_conditions",
    "GroupElement", "WeightSpec", "make_element", "parse_element", "structure_elements",
    "Morphism", "Representation", "are_isomorphic", "build_quiver", "ext1_dim", "hom_basis",
    "hom_dim", "is_exceptional", "validate",
    "CokernelDatum", "ExtensionDatum", "validate_extension_datum",
]
