"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedInputError(ValueError):
    """A state is syntactically valid but not accepted by this operation."""


class DimensionError(ValueError):
    """A state or index has the wrong number of qubits for an operation."""


class InvalidCollapseError(ValueError):
    """Requested a measurement collapse onto a zero-probability outcome."""


class InsufficientBitsError(RuntimeError):
    """A protocol run produced too few sifted bits to form TEST and INFO sets."""
