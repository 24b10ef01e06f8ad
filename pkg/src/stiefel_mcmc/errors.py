"""Exception types shared across the package."""


class StiefelMcmcError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(StiefelMcmcError, ValueError):
    """Array shapes are inconsistent or out of range."""


class ConstraintError(StiefelMcmcError, ValueError):
    """A manifold/normalization constraint is violated (e.g. non-unit vector,
    non-orthonormal frame, asymmetric matrix where symmetry is required)."""


class InputError(StiefelMcmcError, ValueError):
    """Invalid input values (non-finite parameters, bad encodings, ...)."""


class ParseError(InputError):
    """A data file could not be parsed; message includes file location."""
