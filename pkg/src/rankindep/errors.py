"""Exception hierarchy for the rankindep library.

Two broad classes matter to callers (and to the CLI's exit codes):

* :class:`DataError` — the input itself is unusable (ties, non-finite
  values, shape mismatches, parse failures, samples too small, ...).
* :class:`NumericError` — the computation ran but produced something
  that cannot be used (zero permutation variance, ...).
"""


class RankIndepError(Exception):
    """Base class for every error raised by this library."""


class DataError(RankIndepError):
    """Input data or arguments are invalid for the requested operation."""


class NumericError(RankIndepError):
    """A numeric result is degenerate or unusable."""


# --- data errors ----------------------------------------------------------

class NonFiniteInput(DataError):
    """A matrix entry is NaN or infinite."""


class TiesPresent(DataError):
    """Duplicate values found in a column while tie policy forbids them."""


class NotAPermutation(DataError):
    """A rank vector is not a permutation of 1..n."""


class RowCountMismatch(DataError):
    """The two sample blocks do not have the same number of rows."""


class ArityMismatch(DataError):
    """Wrong number of points passed to a kernel."""


class TiedCoordinates(DataError):
    """Kernel/oracle input has tied values along one axis."""


class SampleTooLarge(DataError):
    """Brute-force enumeration refused: n exceeds the oracle cost guard."""


class SampleSmallerThanArity(DataError):
    """n is smaller than the kernel order m."""


class SampleTooSmall(DataError):
    """n is below the minimum for which the requested quantity is defined."""


class EmptyMatrix(DataError):
    """A statistic matrix with no entries cannot be aggregated."""


class KindMismatch(DataError):
    """Correlation kinds of two paired objects disagree."""


class AlphaOutOfRange(DataError):
    """Significance level must lie strictly between 0 and 1."""


class BadLabel(DataError):
    """A generator was called with a setting label it does not handle."""


class DimensionTooSmall(DataError):
    """The requested design needs more columns than the setting provides."""


class SubsampleTooLarge(DataError):
    """Requested subsample size exceeds the number of available rows."""


class EmptyFile(DataError):
    """An input table contains no data rows."""


class ParseError(DataError):
    """A cell could not be parsed as a finite number.

    Carries the 1-based ``line`` and ``col`` of the offending cell.
    """

    def __init__(self, message, line, col):
        super().__init__(f"{message} (line {line}, col {col})")
        self.line = line
        self.col = col


# --- numeric errors -------------------------------------------------------

class DegenerateVariance(NumericError):
    """All permutation draws are numerically equal; scale cannot be set."""


class ZeroSigma(NumericError):
    """A scale estimate is zero or non-finite."""
