"""
Custom exceptions for hapq.
"""


class HapqError(Exception):
    """Base exception for all hapq errors."""

    def __init__(self, message: str, details: str = "", error_code: str = "") -> None:
        self.message = message
        self.details = details
        self.error_code = error_code
        super().__init__(self.message)

    def __str__(self) -> str:
        """Return formatted error message."""
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ConfigError(HapqError):
    """Exception raised for configuration errors."""

    def __init__(self, message: str, details: str = "", config_key: str = "", error_code: str = "CONFIG_ERROR") -> None:
        super().__init__(message, details, error_code)
        self.config_key = config_key


class ConfigMissingError(ConfigError):
    """Exception raised when required configuration keys are absent."""

    def __init__(self, message: str = "Missing configuration keys", missing_keys: list[str] | None = None, **kwargs) -> None:
        super().__init__(message, error_code="CONFIG_MISSING", **kwargs)
        self.missing_keys = list(missing_keys or [])


class ConfigUnknownKeyError(ConfigError):
    """Exception raised for keys the config schema does not define."""

    def __init__(self, message: str = "Unknown configuration key", **kwargs) -> None:
        super().__init__(message, error_code="CONFIG_UNKNOWN_KEY", **kwargs)


class ValidationError(HapqError):
    """Exception raised for validation errors."""

    def __init__(self, message: str, details: str = "", field: str = "", error_code: str = "VALIDATION_ERROR") -> None:
        super().__init__(message, details, error_code)
        self.field = field


class LatticeError(HapqError):
    """Exception raised for lattice geometry errors."""

    def __init__(self, message: str, details: str = "", site: str = "", error_code: str = "LATTICE_ERROR") -> None:
        super().__init__(message, details, error_code)
        self.site = site


class DegeneratePairError(LatticeError):
    """Exception raised when two sites coincide."""

    def __init__(self, message: str = "Coincident site positions", **kwargs) -> None:
        super().__init__(message, error_code="LATTICE_DEGENERATE_PAIR", **kwargs)


class CouplingError(HapqError):
    """Exception raised for dipolar coupling domain errors."""

    def __init__(self, message: str, details: str = "", error_code: str = "COUPLING_ERROR") -> None:
        super().__init__(message, details, error_code)


class SimulationError(HapqError):
    """Exception raised for spin simulation errors."""

    def __init__(self, message: str, details: str = "", operation: str = "", error_code: str = "SIMULATION_ERROR") -> None:
        super().__init__(message, details, error_code)
        self.operation = operation


class DimensionError(SimulationError):
    """Exception raised when operator or state dimensions do not match."""

    def __init__(self, message: str = "Dimension mismatch", **kwargs) -> None:
        super().__init__(message, error_code="SIMULATION_DIMENSION", **kwargs)


class ContractViolationError(SimulationError):
    """Exception raised when an input breaks an operation's contract (e.g. non-Hermitian)."""

    def __init__(self, message: str = "Contract violation", **kwargs) -> None:
        super().__init__(message, error_code="SIMULATION_CONTRACT", **kwargs)


class SpinCapError(SimulationError):
    """Exception raised when a cluster exceeds the dense-matrix spin cap."""

    def __init__(self, message: str = "Too many spins", n_spins: int = 0, **kwargs) -> None:
        super().__init__(message, error_code="SIMULATION_SPIN_CAP", **kwargs)
        self.n_spins = n_spins


class SequenceError(HapqError):
    """Exception raised for pulse sequence errors."""

    def __init__(self, message: str, details: str = "", sequence: str = "", error_code: str = "SEQUENCE_ERROR") -> None:
        super().__init__(message, details, error_code)
        self.sequence = sequence


class QuadratureError(SequenceError):
    """Exception raised when the average Hamiltonian quadrature does not converge."""

    def __init__(self, message: str = "Quadrature did not converge", achieved_tolerance: float = 0.0, **kwargs) -> None:
        super().__init__(message, error_code="SEQUENCE_QUADRATURE", **kwargs)
        self.achieved_tolerance = achieved_tolerance


class GateError(HapqError):
    """Exception raised for gate synthesis and routing errors."""

    def __init__(self, message: str, details: str = "", planes: tuple[int, ...] = (), error_code: str = "GATE_ERROR") -> None:
        super().__init__(message, details, error_code)
        self.planes = planes


class PlannerError(HapqError):
    """Exception raised for device planning errors."""

    def __init__(self, message: str, details: str = "", field: str = "", error_code: str = "PLANNER_ERROR") -> None:
        super().__init__(message, details, error_code)
        self.field = field


# Exception mapping for common error patterns
EXCEPTION_MAPPING = {
    # Numerical linear algebra
    "hermitian": ContractViolationError,
    "dimension": DimensionError,
    "shape": DimensionError,
    "singular": SimulationError,
    "eig": SimulationError,
    "overflow": SimulationError,
    # Sequences
    "quadrature": QuadratureError,
    "sequence": SequenceError,
    "segment": SequenceError,
    # Structure
    "lattice": LatticeError,
    "coupling": CouplingError,
    # Planning
    "plan": PlannerError,
    "config": ConfigError,
}


def get_appropriate_exception(error_message: str, context: str = "") -> type[HapqError]:
    """
    Get the most appropriate exception class based on error message and context.

    Args:
        error_message: The error message
        context: Additional context about where the error occurred

    Returns:
        The most appropriate exception class
    """
    error_lower = error_message.lower()
    context_lower = context.lower()

    # Check context first for more specific matching
    for keyword, exception_class in EXCEPTION_MAPPING.items():
        if keyword in context_lower:
            return exception_class
    for keyword, exception_class in EXCEPTION_MAPPING.items():
        if keyword in error_lower:
            return exception_class

    return HapqError


def create_exception_from_generic(generic_exception: Exception, context: str = "") -> HapqError:
    """
    Create a specific HapqError from a generic exception.

    Args:
        generic_exception: The original generic exception
        context: Context about where the error occurred

    Returns:
        A specific HapqError instance
    """
    error_message = str(generic_exception) or type(generic_exception).__name__
    exception_class = get_appropriate_exception(error_message, context)

    return exception_class(message=error_message, details=f"Original exception: {type(generic_exception).__name__}")
