"""Exception hierarchy.

Three branches matter to the CLI exit-code mapping: ConfigError (exit 2),
DataError (exit 3) and NumericalError (exit 4). Everything raised by this
package derives from SeizureFitError.
"""


class SeizureFitError(Exception):
    """Base class for all errors raised by seizurefit."""


class ConfigError(SeizureFitError):
    """Invalid configuration, flags, or pipeline wiring."""


class DataError(SeizureFitError):
    """Malformed or inconsistent input data."""


class NumericalError(SeizureFitError):
    """A computation degenerated (rank loss, undefined statistic, ...)."""


# --- EDF / annotation ingestion -------------------------------------------

class TruncatedHeader(DataError):
    """Fewer header bytes than the signal count requires."""


class NonNumericField(DataError):
    """A numeric header field did not parse."""


class InvalidRange(DataError):
    """digital_min >= digital_max for some signal."""


class MixedSamplingRates(DataError):
    """Signals in one file disagree on sampling rate."""


class UnknownChannelLabel(DataError):
    """A requested channel label is absent from the header."""


class TruncatedRecord(DataError):
    """Data records end before the header-declared sample count."""


class OverlapError(DataError):
    """Annotated intervals overlap."""


class OrderError(DataError):
    """An interval has offset <= onset."""


# --- segmentation -----------------------------------------------------------

class WindowTooLong(DataError):
    """The segmentation window exceeds the recording length."""


# --- central-difference filter ----------------------------------------------

class InvalidSkip(ConfigError):
    """Skip factor below 1."""


class InvalidInterval(ConfigError):
    """Non-positive sample interval."""


class FrequencyOutOfRange(ConfigError):
    """Requested frequency outside [0, Fs/2]."""


# --- curve fitting / features -----------------------------------------------

class TooFewPoints(DataError):
    """Not enough samples for the requested fit or statistic."""


class LengthMismatch(DataError):
    """Paired vectors have different lengths."""


class RankDeficient(NumericalError):
    """Design matrix is numerically rank deficient."""


class DegenerateDof(NumericalError):
    """No residual degrees of freedom; confidence bounds unavailable."""


class ZeroTotalVariation(NumericalError):
    """All responses equal; R-square undefined."""


class EmptyTrainingSet(DataError):
    """Scaler fitting requires at least one vector."""


# --- forest / evaluation -----------------------------------------------------

class SingleClassDataset(DataError):
    """Forest training requires both classes."""


class BadK(ConfigError):
    """Fold count outside [2, n]."""
