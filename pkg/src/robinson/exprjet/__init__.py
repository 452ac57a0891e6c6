"""Coordinate expressions and their second-order jets."""

from .expression import (Chart, Expression, constant, eval_jet2, finite_difference_jet, parse,
                         wirtinger)
from .jet import DomainError, Jet2, compose, lift
from .parser import ArityError, ExpressionError, ParseError, UnknownIdentifier, to_text

__all__ = [
    "ArityError", "Chart", "DomainError", "Expression", "ExpressionError", "Jet2", "ParseError",
    "UnknownIdentifier", "compose", "constant", "eval_jet2", "finite_difference_jet", "lift",
    "parse", "to_text", "wirtinger",
]
