"""Spinal groups of rooted-tree automorphisms: words, sections, orders and growth."""
from .bounds import growth_exponents, reproduce_table2, solve_eta, tau_values
from .core import DecompositionTree, GroupElement, SpinalGroup
from .errors import SpinalError
from .finite_algebra import (
    FiniteGroup,
    SpinalData,
    build_epimorphism,
    build_group,
    validate_action,
    validate_spinal_data,
)
from .growth import enumerate_ball, portrait
from .omega import OmegaSequence, is_admissible
from .period import element_order, order, period_sequence, period_shadow
from .presets import grigorchuk2, grigorchukP, holt
from .specfile import spec_from_dict
from .words import Word, WeightScheme

__all__ = [
    "DecompositionTree", "FiniteGroup", "GroupElement", "OmegaSequence", "SpinalData",
    "SpinalError", "SpinalGroup", "WeightScheme", "Word", "build_epimorphism", "build_group",
    "element_order", "enumerate_ball", "grigorchuk2", "grigorchukP", "growth_exponents", "holt",
    "is_admissible", "order", "period_sequence", "period_shadow", "portrait", "reproduce_table2",
    "solve_eta", "spec_from_dict", "tau_values", "validate_action", "validate_spinal_data",
]
