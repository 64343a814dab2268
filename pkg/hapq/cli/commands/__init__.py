"""
CLI command handlers for hapq.
"""

# Import handlers for use in main CLI
from hapq.cli.commands import avgham, couplings, gate, plan, simulate

__all__ = ["avgham", "couplings", "gate", "plan", "simulate"]
