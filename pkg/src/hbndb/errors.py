"""Exception hierarchy.

Everything raised on purpose derives from :class:`HbnDbError` so callers can
catch package failures with a single except clause. Parse errors carry the
offending location; validation errors name the field that failed.
"""


class HbnDbError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HbnDbError):
    """An input value violates a documented invariant."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class StructureMismatchError(HbnDbError):
    """Ground/excited structures disagree in atom count, species or order."""


class AmbiguousMappingError(HbnDbError):
    """A displacement exceeds half the shortest lattice vector, so the
    minimum-image assignment between the two geometries is not unique."""


class CoverageError(HbnDbError):
    """An energy grid truncates a non-negligible fraction of spectral weight."""


class ConvergenceError(HbnDbError):
    """Time-domain integration did not decay within the configured span."""


class DegenerateTransitionError(HbnDbError):
    """Transition energy too small to divide by when forming the dipole."""


class UndefinedAngleError(HbnDbError):
    """Polarization angle requested for a dipole with no in-plane component."""

    def __init__(self, message, reason="no-in-plane-component"):
        super().__init__(message)
        self.reason = reason


class UndefinedVisibilityError(HbnDbError):
    """Visibility requested for a zero dipole."""


class ConstantSeriesError(HbnDbError):
    """Rank correlation is undefined because a series has no variation."""


class ParseError(HbnDbError):
    """Input text could not be parsed; carries file/line/column context."""

    def __init__(self, message, source=None, line=None, column=None):
        loc = ""
        if source is not None:
            loc += f"{source}:"
        if line is not None:
            loc += f"{line}:"
        if column is not None:
            loc += f"{column}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.source = source
        self.line = line
        self.column = column


class ConflictError(HbnDbError):
    """A record with the same identity tuple is already stored."""


class UnknownOptionError(HbnDbError):
    """A query names an option key that is not in the schema."""

    def __init__(self, key):
        super().__init__(f"unknown option key: {key!r}")
        self.key = key


class AmbiguousRangeError(HbnDbError):
    """value_range given with zero or several numeric options selected."""


class SnapshotUnavailableError(HbnDbError):
    """The service has no sealed database snapshot to serve."""
