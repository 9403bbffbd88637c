"""Exception types shared across the package.

The command-line layer maps these onto exit codes: :class:`ParseError`
exits with 2, :class:`ValidationError` (and subclasses) with 3.
"""


class LeakPricerError(Exception):
    """Base class for every error raised by this package."""


class ParseError(LeakPricerError):
    """An input file is missing, unreadable, or not decodable."""


class ValidationError(LeakPricerError):
    """Inputs were read but violate a domain contract."""


class EstimationError(ValidationError):
    """A density or information estimate could not be computed safely."""
