"""Numerical verification lab for improved Beckner, Hoelder and Poincare
inequalities on Gaussian space."""

from .errors import ConfigurationError, DomainError, NumericalError, RangeError
from .reports import CheckReport

__version__ = "0.1.0"

__all__ = ["CheckReport", "ConfigurationError", "DomainError", "NumericalError", "RangeError", "__version__"]
