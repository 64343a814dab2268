"""
Helper functions for hapq: unit parsing and report number formatting.
"""

import math
import re

# Multipliers into SI base units, keyed by the suffixes accepted in config files.
LENGTH_UNITS = {
    "m": 1.0,
    "cm": 1e-2,
    "mm": 1e-3,
    "um": 1e-6,
    "µm": 1e-6,
    "nm": 1e-9,
    "Å": 1e-10,
    "A": 1e-10,
    "angstrom": 1e-10,
}
FREQUENCY_UNITS = {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6}
GRADIENT_UNITS = {"T/m": 1.0, "G/cm": 1e-2, "Gauss/cm": 1e-2}
TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9}

UNIT_TABLES = {
    "length": LENGTH_UNITS,
    "frequency": FREQUENCY_UNITS,
    "gradient": GRADIENT_UNITS,
    "time": TIME_UNITS,
}

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")


def parse_quantity(text: str, kind: str) -> float:
    """
    Parse a number with an optional unit suffix into SI units.

    Args:
        text: Value such as ``"3.44 Å"``, ``"45 kHz"`` or ``"2e6 G/cm"``
        kind: One of ``length``, ``frequency``, ``gradient``, ``time``

    Returns:
        The value in SI units (m, Hz, T/m, s)

    Raises:
        ValueError: If the number or the unit cannot be parsed
    """
    match = _QUANTITY.match(text)
    if not match:
        raise ValueError(f"Cannot parse {kind} value: {text!r}")

    number, unit = float(match.group(1)), match.group(2)
    table = UNIT_TABLES[kind]
    if not unit:
        return number
    if unit not in table:
        raise ValueError(f"Unknown {kind} unit {unit!r} (expected one of {', '.join(table)})")
    return number * table[unit]


def format_sig(value: float, digits: int = 6) -> str:
    """
    Format a number with a fixed count of significant digits.

    Args:
        value: Number to format
        digits: Significant digits

    Returns:
        Deterministic string representation
    """
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0.0:
        # normalise -0.0
        return "0"
    return f"{value:.{digits}g}"


def parse_bool(text: str) -> bool:
    """Parse a config boolean."""
    lowered = text.strip().lower()
    if lowered in {"true", "yes", "on", "1"}:
        return True
    if lowered in {"false", "no", "off", "0"}:
        return False
    raise ValueError(f"Cannot parse boolean: {text!r}")
