"""Shared exception types."""


class FrobsfError(Exception):
    """Base class for package errors."""


class CapacityError(FrobsfError):
    """An input exceeds a configured memory or table capacity."""


class BudgetError(CapacityError):
    """An input exceeds a configured computational budget."""


class FactorizationError(FrobsfError):
    """Factorization did not complete within its iteration budget."""


class SingularCurveError(ValueError, FrobsfError):
    """The Weierstrass data has vanishing discriminant."""


class BadReductionError(ValueError, FrobsfError):
    """The requested prime is one of bad reduction (or 2, 3)."""


class PolyParseError(ValueError, FrobsfError):
    """Polynomial text does not parse.

    ``offset`` is the 0-based byte offset of the first offending character.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset
