"""Exception hierarchy shared by the library and the CLI."""


class PseudorotError(Exception):
    """Base class for all library errors."""


class InvalidInputError(PseudorotError, ValueError):
    """Malformed parameters or configuration."""


class HypothesisError(PseudorotError):
    """The rotation-set hypothesis fails for the given map or interval (CLI exit code 2)."""


class ResolutionError(PseudorotError):
    """No certificate could be produced at the explored resolutions (CLI exit code 3)."""


class NonGenericInputError(PseudorotError, ValueError):
    """Geometric input is degenerate (overlapping segments, coincident endpoints)."""


class InternalCheckError(PseudorotError, AssertionError):
    """A property guaranteed by the mathematics failed at runtime."""
