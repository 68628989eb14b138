"""Semantic exception hierarchy.

Every error raised by this package derives from :class:`SigPalError`,
so callers can catch one type at an engine boundary.
"""


class SigPalError(Exception):
    """Base error for the sigpal package."""


class DatasetError(SigPalError, ValueError):
    """A dataset violates its contract (shape, finiteness, labels)."""


class CsvFormatError(DatasetError):
    """A CSV file cannot be parsed into a dataset; message names the cell."""


class DegenerateDataError(SigPalError):
    """Data carry no usable variation (zero total sum of squares / zero noise)."""


class InfeasibleConstraintsError(SigPalError):
    """No cluster assignment satisfies the must-link / cannot-link constraints."""


class ZeroDirectionError(SigPalError):
    """A direction fit collapsed to the zero vector (e.g. L1 penalty too large)."""


class EngineError(SigPalError):
    """A test engine failed; message carries the failing replicate index."""
