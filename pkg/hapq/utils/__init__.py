"""
Utility functions for hapq.
"""

from hapq.utils.helpers import format_sig, parse_bool, parse_quantity
from hapq.utils.reporting import write_csv, write_json, write_text

__all__ = ["format_sig", "parse_bool", "parse_quantity", "write_csv", "write_json", "write_text"]
