"""Scattered subspaces with respect to spreads: exact finite-field geometry,
counting, lattice, rank-metric and minimal-code tooling."""

__version__ = "0.1.0"

from .errors import GuardError, ScatterlabError, ValidationError, VerificationError
from .fields import FieldTower, FiniteField, make_field, make_tower, tower_for
from .subspaces import Subspace, canonicalize
from .spreads import PartialSpread, desarguesian_spread

__all__ = [
    "__version__", "GuardError", "ScatterlabError", "ValidationError", "VerificationError",
    "FieldTower", "FiniteField", "make_field", "make_tower", "tower_for", "Subspace",
    "canonicalize", "PartialSpread", "desarguesian_spread",
]
