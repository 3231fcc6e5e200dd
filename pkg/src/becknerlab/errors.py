"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class RangeError(OverflowError):
    """The result is not representable as a finite double."""


class NumericalError(ArithmeticError):
    """A quadrature failed to converge.

    ``nodes`` records how many nodes were in use when the rule gave up.
    """

    def __init__(self, message, nodes=None):
        if nodes is not None:
            message = f"{message} (nodes={nodes})"
        super().__init__(message)
        self.nodes = nodes


class ConfigurationError(ValueError):
    """Inconsistent run configuration (dimension mismatch, bad manifest, ...)."""
