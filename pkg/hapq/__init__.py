"""
hapq - Spin-dynamics simulator and device planner for hydroxyapatite plane-qubit solid-state NMR.
"""

__version__ = "0.1.0"
__author__ = "hapq developers"
__description__ = "Spin-dynamics simulator and device planner for hydroxyapatite plane-qubit solid-state NMR"

from hapq.core.config import Config
from hapq.core.exceptions import HapqError

__all__ = ["Config", "HapqError", "__version__"]
