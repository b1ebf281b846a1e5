"""Exact elementary-generation toolkit for SL(n) over orders and their localizations."""
from .errors import ElgenError, InvalidWitness, NotInW, ParseError, SearchExhausted
from .matgroup import E, ElementaryWord, SquareMatrix, WPair, evaluate_word
from .mennicke import DerivationStep, DerivationTrace, certify_trivial, exponent_kill, validate_trace
from .quotient import FiniteQuotient
from .ring import LocalizedRing, RingElement, make_ring

__all__ = [
    "E", "DerivationStep", "DerivationTrace", "ElementaryWord", "ElgenError", "FiniteQuotient",
    "InvalidWitness", "LocalizedRing", "NotInW", "ParseError", "RingElement", "SearchExhausted",
    "SquareMatrix", "WPair", "certify_trivial", "evaluate_word", "exponent_kill", "make_ring",
    "validate_trace",
]
__version__ = "0.1.0"
