"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class InfiniteValuation(DomainError):
    """Raised when asking for the valuation of zero.

    Kept distinct from a numeric return so callers cannot mistake it
    for a large finite valuation.
    """


class BudgetError(DomainError):
    """An enumeration would exceed the configured tuple budget."""

    def __init__(self, message: str, size: int, budget: int):
        super().__init__(message)
        self.size = size
        self.budget = budget


class UnattainableWidth(DomainError):
    """The requested interval width cannot be certified for this spectrum.

    ``best_width`` is the narrowest certifiable width, or ``None`` when no
    certified width exists at all (the spectrum carries no tail majorant).
    """

    def __init__(self, message: str, best_width=None):
        super().__init__(message)
        self.best_width = best_width
