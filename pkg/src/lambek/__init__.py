"""Substructural sequent calculi around the Lambek calculus."""

from .core import (
    CalculusId,
    Derivation,
    Formula,
    ParseError,
    Sequent,
    parse_formula,
    parse_sequent,
    render,
)

__all__ = [
    "CalculusId",
    "Derivation",
    "Formula",
    "ParseError",
    "Sequent",
    "parse_formula",
    "parse_sequent",
    "render",
]
