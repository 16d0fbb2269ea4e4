"""Exception hierarchy shared across the package."""


class MTAError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(MTAError):
    """A vector with (numerically) zero norm where a direction is required."""


class DimensionMismatch(MTAError):
    """Operands whose shapes cannot be combined."""


class InconsistentClasses(MTAError):
    """Prediction reports with differing class counts cannot be combined."""


class DimensionTooLarge(MTAError):
    """Exhaustive oracles only run at desk scale."""


class FormatError(MTAError):
    """Malformed bundle header (bad magic, unknown version, missing keys)."""


class SizeMismatch(MTAError):
    """Raw matrix file length disagrees with the declared dimensions."""


class NonFinite(MTAError):
    """NaN or infinity found in loaded data."""
