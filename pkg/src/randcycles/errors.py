"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures with 1, and the enumeration size guard with 3.
"""


class RandcyclesError(Exception):
    """Base class for package errors."""


class DomainError(RandcyclesError):
    """A point lies outside the interval where an operation is defined."""


class ParameterError(RandcyclesError):
    """A builder or operation received an invalid parameter."""


class MarkovStructureError(RandcyclesError):
    """A branch image is not a union of partition cells (structure check failed)."""


class InadmissibleWordError(RandcyclesError):
    """A symbol word violates the transition structure or has an empty cylinder."""


class SizeGuardError(RandcyclesError):
    """An enumeration would exceed the configured candidate-count guard."""


class NumericalError(RandcyclesError):
    """A numerical routine failed (non-convergence, internal inconsistency)."""


class ConvergenceError(NumericalError):
    """Iteration failed to reach tolerance; carries the last residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
