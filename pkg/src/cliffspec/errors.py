"""Exception types shared across the package."""


class CliffSpecError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(CliffSpecError, ValueError):
    """Operands live in incompatible algebras or modules."""


class DegenerateInputError(CliffSpecError, ValueError):
    """An input is degenerate for the requested operation (e.g. zero paravector)."""


class ArgumentError(CliffSpecError, ValueError):
    """An argument is outside its admissible range."""


class DomainError(CliffSpecError, ValueError):
    """A point lies outside the domain of a slice function."""


class NotInvertibleError(CliffSpecError, RuntimeError):
    """An operator is singular to working tolerance.

    Carries the offending smallest singular value in ``sigma_min``.
    """

    def __init__(self, message, sigma_min=None):
        super().__init__(message)
        self.sigma_min = sigma_min


class PreconditionError(CliffSpecError, RuntimeError):
    """A certified precondition (bisectoriality, certificates) is missing."""


class NumericalFailureError(CliffSpecError, RuntimeError):
    """A non-finite intermediate value appeared; carries the node location."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class CertificationError(CliffSpecError, ValueError):
    """A sampling-based certificate could not be established."""


class SchemaError(CliffSpecError, ValueError):
    """An input file violates the documented schema."""
