"""
Core functionality for hapq: configuration and the exception hierarchy.
"""

from hapq.core.config import Config
from hapq.core.exceptions import (
    ConfigError,
    ConfigMissingError,
    ConfigUnknownKeyError,
    ContractViolationError,
    CouplingError,
    DegeneratePairError,
    DimensionError,
    GateError,
    HapqError,
    LatticeError,
    PlannerError,
    QuadratureError,
    SequenceError,
    SimulationError,
    SpinCapError,
    ValidationError,
    create_exception_from_generic,
    get_appropriate_exception,
)

__all__ = [
    "Config",
    "HapqError",
    "ConfigError",
    "ConfigMissingError",
    "ConfigUnknownKeyError",
    "ValidationError",
    "LatticeError",
    "DegeneratePairError",
    "CouplingError",
    "SimulationError",
    "DimensionError",
    "ContractViolationError",
    "SpinCapError",
    "SequenceError",
    "QuadratureError",
    "GateError",
    "PlannerError",
    "get_appropriate_exception",
    "create_exception_from_generic",
]
