"""Exception hierarchy shared by the computational modules and the CLI."""


class TensorCLTError(Exception):
    """Base class for all errors raised by :mod:`tensorclt`."""


class DomainError(TensorCLTError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapExceededError(TensorCLTError, ValueError):
    """A size guard (enumeration, expansion or matrix cap) was exceeded."""


class TruncationError(TensorCLTError, ValueError):
    """A free cumulant beyond the supplied truncation order was required."""

    def __init__(self, required: int, available: int):
        self.required = required
        self.available = available
        super().__init__(
            f"free cumulant of order {required} required but only "
            f"{available} supplied; extend the cumulant list to order >= {required}"
        )
