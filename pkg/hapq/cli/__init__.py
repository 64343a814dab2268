"""
CLI components for hapq.
"""

from hapq.cli.main import app

__all__ = ["app"]
