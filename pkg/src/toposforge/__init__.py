"""Finite-scale constructions for predicative toposes.

Modules: ``finset`` (finite sets, pretopos operations, W-types),
``cat`` (finite categories), ``presheaf`` and ``wpresheaf`` (presheaves and
their W-types), ``site`` and ``sheaf`` (sites, generated Grothendieck sites,
sheafification) and ``smallmap`` (classes of small maps).
"""

from ._core import BudgetExceeded, InputError
from .cat import CatPresentation, FinCategory, compile_presentation, poset_category
from .finset import FinFunction, FinSet, Signature, WTree, nno_signature, wtype_enumerate
from .presheaf import Presheaf, PresheafMorphism, yoneda
from .sheaf import is_sheaf, same_sheaves, sheafify
from .site import CoveringFamily, Site, generate_grothendieck
from .smallmap import AllMaps, Explicit, FiberBound, ProbeUniverse
from .wpresheaf import wtype_presheaf

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "InputError",
    "CatPresentation",
    "FinCategory",
    "compile_presentation",
    "poset_category",
    "FinFunction",
    "FinSet",
    "Signature",
    "WTree",
    "nno_signature",
    "wtype_enumerate",
    "Presheaf",
    "PresheafMorphism",
    "yoneda",
    "is_sheaf",
    "same_sheaves",
    "sheafify",
    "CoveringFamily",
    "Site",
    "generate_grothendieck",
    "AllMaps",
    "Explicit",
    "FiberBound",
    "ProbeUniverse",
    "wtype_presheaf",
]
