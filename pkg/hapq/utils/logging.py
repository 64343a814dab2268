"""
Logging utilities for hapq.
"""

import logging

from rich.console import Console
from rich.logging import RichHandler

from hapq.core.config import LoggingConfig


def setup_logging(config: LoggingConfig, verbose: bool = False) -> logging.Logger:
    """
    Set up logging configuration.

    Args:
        config: Logging configuration
        verbose: Force DEBUG level regardless of the configured level

    Returns:
        Configured logger instance
    """
    level = logging.DEBUG if verbose else getattr(logging, config.level.upper(), logging.INFO)

    logger = logging.getLogger("hapq")
    logger.setLevel(level)

    # Clear existing handlers
    logger.handlers.clear()

    # Console handler on stderr so reports on stdout stay clean
    console = Console(stderr=True)
    console_handler = RichHandler(console=console, show_time=True, show_path=False, markup=True)
    console_handler.setLevel(level)
    console_handler.setFormatter(logging.Formatter("%(message)s", datefmt="%Y-%m-%d %H:%M:%S"))
    logger.addHandler(console_handler)

    if config.file:
        file_handler = logging.FileHandler(config.file)
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s"))
        logger.addHandler(file_handler)

    return logger
