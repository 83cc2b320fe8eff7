"""Exception hierarchy.

Two families: :class:`InputError` for bad user input (the CLI exits with 2)
and :class:`NumericalError` for estimation failures on otherwise valid input
(the CLI exits with 3).
"""


class QuantestError(Exception):
    """Base class for all errors raised by quantest."""


class InputError(QuantestError, ValueError):
    """Invalid data, configuration or arguments."""


class NumericalError(QuantestError, ArithmeticError):
    """A computation could not produce a usable result."""


class TooFewGroups(InputError):
    """Fewer than two groups were supplied."""


class TooFewObservations(InputError):
    """A group has fewer than two observations."""


class NonFiniteValue(InputError):
    """A NaN or infinite observation was supplied."""


class ParseError(InputError):
    """A CSV file could not be read as numeric samples."""

    def __init__(self, path, row, column, message):
        self.path = path
        self.row = row
        self.column = column
        super().__init__(f"{path}: row {row}, column {column}: {message}")


class InvalidProbability(InputError):
    """A probability argument lies outside its allowed range."""


class NegativeInput(InputError):
    """A nonnegative argument was negative."""


class NonpositiveScale(InputError):
    """A scale parameter was zero or negative."""


class NonpositiveDensity(InputError):
    """A supplied true density value was zero or negative."""


class NonpositiveVariance(InputError):
    """A variance entry was zero or negative."""


class ZeroDispersion(NumericalError):
    """A sample has no spread, so no bandwidth can be chosen."""


class DegenerateDensity(NumericalError):
    """The density estimate at the quantile point is numerically zero."""


class NotPositiveDefinite(NumericalError):
    """A tridiagonal factorization produced a non-positive pivot."""


class ConvergenceError(NumericalError):
    """An iterative routine hit its iteration cap."""
