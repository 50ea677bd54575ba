"""Exception hierarchy.

Every error raised by this package derives from :class:`AptWelfareError`, so
callers can catch one type at an API boundary. Subclasses mix in the closest
builtin category where one exists (``LookupError`` for off-grid queries,
``ValueError`` for malformed values) so the classes also behave well inside
generic tooling.
"""

from __future__ import annotations


class AptWelfareError(Exception):
    """Base class for all package errors."""


class CsvFormatError(AptWelfareError, ValueError):
    """Malformed CSV input: bad header, wrong field count, unparseable or
    duplicate rows. Messages carry the 1-based row number."""


class DomainError(AptWelfareError, ValueError):
    """A value is outside its admissible range (share not in [0, 1],
    negative price, non-positive income, invalid curve knots, ...)."""


class CoverageError(AptWelfareError, ValueError):
    """The price/income grid has structural holes: missing zero price,
    an income with no matching grid price, or absent cells."""


class GridLookupError(AptWelfareError, LookupError):
    """A query referenced a price or income that is not on the grid, or a
    cell with price above income. Queries never extrapolate."""


class NoZeroPriceError(AptWelfareError):
    """An income column never reaches a zero share, so the price at which
    purchases stop is undefined."""


class IncomeVarianceError(AptWelfareError):
    """Choice shares vary with income at a common price, so the dataset has
    no income-free share curve."""


class WellDefinednessError(AptWelfareError):
    """Conflicting positive shares at a common price prevent a single-valued
    attention CDF from being read off the data."""


class NotRationalizableError(AptWelfareError, ValueError):
    """The dataset failed the axiom suite required for the requested
    construction. Carries the suite result as ``suite`` when available."""

    def __init__(self, message: str, suite=None):
        super().__init__(message)
        self.suite = suite


class VerificationError(AptWelfareError):
    """Constructed primitives failed to reproduce the data they were built
    from, or an internal monotonicity assertion failed. Signals an upstream
    inconsistency, not bad user input."""


class NotApplicableError(AptWelfareError):
    """The welfare question is undefined for the requested cell (for example
    nobody buys at the initial price, so no reservation price is revealed)."""


class ProvenanceError(AptWelfareError, ValueError):
    """Two distributions built from different price changes were combined."""


class ConvergenceError(AptWelfareError):
    """Bisection exceeded its iteration budget; usually a malformed or
    non-monotone utility tabulation."""
