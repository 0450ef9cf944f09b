"""Exact tools for amenability and paradoxicality of inverse semigroups and their actions."""
from .core import InverseSemigroup, PartialBijection, Semigroup, generate_closure
from .rep import Representation, Word
from .setalg import AffinePartialMap, FiniteSet, UPSet

__all__ = [
    "AffinePartialMap",
    "FiniteSet",
    "InverseSemigroup",
    "PartialBijection",
    "Representation",
    "Semigroup",
    "UPSet",
    "Word",
    "generate_closure",
]

__version__ = "0.1.0"
