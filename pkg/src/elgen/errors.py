"""Exception hierarchy shared by every module."""
from __future__ import annotations


class ElgenError(Exception):
    """Base class for all library errors."""


class ParseError(ElgenError):
    pass


class NotMonic(ElgenError):
    pass


class NotIrreducible(ElgenError):
    pass


class NotInRing(ElgenError):
    pass


class RingMismatch(ElgenError):
    pass


class NotDivisible(ElgenError):
    pass


class NotAUnit(ElgenError):
    pass


class NotAUnitModulo(ElgenError):
    pass


class ZeroModulus(ElgenError):
    pass


class NoInfiniteUnits(ElgenError):
    pass


class SearchExhausted(ElgenError):
    def __init__(self, what: str, budget: int | None = None):
        self.budget = budget
        msg = what if budget is None else f"{what} (budget {budget})"
        super().__init__(msg)


class BudgetExceeded(ElgenError):
    pass


class NotCoprime(ElgenError):
    pass


class NotDeterminantOne(ElgenError):
    pass


class NotInW(ElgenError):
    pass


class NotAField(ElgenError):
    pass


class NotUnimodular(ElgenError):
    pass


class NotInVas(ElgenError):
    pass


class BadIdealPair(ElgenError):
    pass


class NotCongruent(ElgenError):
    pass


class ImproperIdeal(ElgenError):
    pass


class DimensionTooSmall(ElgenError):
    pass


class LevelTooLow(ElgenError):
    pass


class InvalidWitness(ElgenError):
    pass


class DegenerateEntry(ElgenError):
    pass


class NonPrincipal(ElgenError):
    pass
