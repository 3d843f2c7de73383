"""Error classes shared across the package.

Every user-facing failure maps to one of these; the CLI prints the class
name followed by a message on a single stderr line and exits nonzero.
"""


class FracspecError(Exception):
    """Base class for all fracspec errors."""


class EmptyInput(FracspecError):
    """Input file or series contains no usable rows."""


class MalformedRow(FracspecError):
    """A CSV row failed to parse; the message carries the line number."""


class NonPositivePrice(FracspecError):
    """Prices must be strictly positive."""


class DuplicateDate(FracspecError):
    """Two rows share the same date (ambiguous close)."""


class NonUniformSpacing(FracspecError):
    """Calendar gap beyond the configured tolerance."""


class SeriesTooShort(FracspecError):
    """Operation needs more samples than the series provides."""


class WindowExceedsSeries(FracspecError):
    """Requested window is longer than the series."""


class InvalidInertialRange(FracspecError):
    """Scale range violates 1 <= j_i < j_e <= floor(M/2)."""


class DegenerateSpectrum(FracspecError):
    """A spectral value is zero or negative; log-log fit undefined."""


class InvalidMomentOrder(FracspecError):
    """Moment order q must be strictly positive."""


class InvalidPathSpec(FracspecError):
    """Synthetic path specification violates its invariants."""


class PathTooLong(FracspecError):
    """Path length exceeds the cap of the exact sampling method."""


class InfeasiblePartition(FracspecError):
    """No partition satisfies the segment-count / minimum-length constraints."""


class EmptyIntersection(FracspecError):
    """Series share no common date range."""


class InsufficientData(FracspecError):
    """A period is too short for the largest requested scale."""


class ZeroVariance(FracspecError):
    """Correlation undefined for a constant sequence."""


class ConstantSeries(FracspecError):
    """All differences equal; rank transform undefined."""


class GridMismatch(FracspecError):
    """Two rolling tracks do not share the same window grid."""


class InvalidConfig(FracspecError):
    """A run parameter violates a module precondition."""
