"""Exception and warning types raised by the package."""


class FloquetLatticeError(Exception):
    """Base class for all package errors."""


class InvalidInputError(FloquetLatticeError, ValueError):
    """An argument violates a documented precondition."""


class InvalidWindowError(InvalidInputError):
    """A sampling or fitting window is out of range or unusable."""


class NumericalFailureError(FloquetLatticeError, RuntimeError):
    """A numerical routine (e.g. the eigensolver) did not converge."""


class DegenerateSelectionError(FloquetLatticeError):
    """Central-state selection is ambiguous.

    Attributes
    ----------
    candidates : tuple of int
        Indices of the competing states.
    """

    def __init__(self, message, candidates=()):
        super().__init__(message)
        self.candidates = tuple(candidates)


class ConfigParseError(InvalidInputError):
    """A configuration file cannot be parsed or contains unknown keys."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line


class ConfigValidationError(InvalidInputError):
    """A configuration value violates an invariant."""


class TruncationWarning(UserWarning):
    """The Floquet truncation is too small to reproduce the initial state."""
