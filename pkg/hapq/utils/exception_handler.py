"""
Exception handling utilities for hapq.
"""

import logging
from collections.abc import Callable
from functools import wraps
from typing import TypeVar

import numpy as np

from hapq.core.exceptions import (
    HapqError,
    PlannerError,
    SequenceError,
    SimulationError,
    create_exception_from_generic,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")


def handle_simulation_exceptions(func: Callable[..., T]) -> Callable[..., T]:
    """
    Decorator to handle numerical exceptions in spin simulations consistently.

    Args:
        func: Function to wrap

    Returns:
        Wrapped function with simulation exception handling
    """

    @wraps(func)
    def wrapper(*args, **kwargs) -> T:
        try:
            return func(*args, **kwargs)
        except HapqError:
            raise
        except (np.linalg.LinAlgError, FloatingPointError) as e:
            raise SimulationError(str(e), details=f"Function: {func.__name__}", operation=func.__name__) from e
        except Exception as e:
            converted = create_exception_from_generic(e, context="simulation")
            converted.details = f"Function: {func.__name__}"
            raise converted from e

    return wrapper


def handle_sequence_exceptions(func: Callable[..., T]) -> Callable[..., T]:
    """
    Decorator to handle pulse sequence exceptions consistently.

    Args:
        func: Function to wrap

    Returns:
        Wrapped function with sequence exception handling
    """

    @wraps(func)
    def wrapper(*args, **kwargs) -> T:
        try:
            return func(*args, **kwargs)
        except HapqError:
            raise
        except Exception as e:
            raise SequenceError(str(e), details=f"Function: {func.__name__}") from e

    return wrapper


def handle_planner_exceptions(func: Callable[..., T]) -> Callable[..., T]:
    """
    Decorator to handle device planning exceptions consistently.

    Args:
        func: Function to wrap

    Returns:
        Wrapped function with planner exception handling
    """

    @wraps(func)
    def wrapper(*args, **kwargs) -> T:
        try:
            return func(*args, **kwargs)
        except HapqError:
            raise
        except (ValueError, ZeroDivisionError, OverflowError) as e:
            raise PlannerError(str(e), details=f"Function: {func.__name__}") from e

    return wrapper


def log_exception(
    exception: Exception, context: str = "", level: int = logging.ERROR, include_traceback: bool = False
) -> None:
    """
    Log an exception with appropriate formatting.

    Args:
        exception: The exception to log
        context: Context about where the error occurred
        level: Logging level
        include_traceback: Whether to include full traceback
    """
    if isinstance(exception, HapqError):
        message = f"[{exception.error_code}] {exception.message}"
        if exception.details:
            message += f" | Details: {exception.details}"
    else:
        message = f"Unexpected error: {str(exception)}"

    if context:
        message = f"{context}: {message}"

    logger.log(level, message)

    if include_traceback:
        logger.log(level, "Traceback:", exc_info=True)
