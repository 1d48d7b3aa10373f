"""Blackbody radiation, its external-field generalization, and lattice heat capacities."""

__version__ = "0.1.0"

from .errors import (ConvergenceError, DegenerateCaseError, DivergenceError,
                     DomainError)
from .quadrature import QuadratureSpec
from .radiation import NATURAL, SI, PhysicalConstants
from .extfield import ExternalField

__all__ = [
    "ConvergenceError", "DegenerateCaseError", "DivergenceError",
    "DomainError", "QuadratureSpec", "PhysicalConstants", "SI", "NATURAL",
    "ExternalField", "__version__",
]
