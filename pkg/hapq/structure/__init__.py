"""
Crystal structure: lattice sites, physical constants and dipolar couplings.
"""

from hapq.structure.constants import ANGSTROM, CONSTANTS, MAGIC_ANGLE, PhysicalConstants
from hapq.structure.couplings import (
    REFERENCE_PAIRS,
    CouplingEntry,
    CouplingTable,
    coupling_table,
    coupling_table_to_csv,
    dipolar_coupling_hz,
    reference_coupling_rows,
)
from hapq.structure.lattice import LatticeSpec, SpinSite, build_lattice, pair_geometry, select_sites, sites_to_csv

__all__ = [
    "ANGSTROM",
    "CONSTANTS",
    "MAGIC_ANGLE",
    "PhysicalConstants",
    "LatticeSpec",
    "SpinSite",
    "build_lattice",
    "pair_geometry",
    "select_sites",
    "sites_to_csv",
    "CouplingEntry",
    "CouplingTable",
    "coupling_table",
    "coupling_table_to_csv",
    "dipolar_coupling_hz",
    "reference_coupling_rows",
    "REFERENCE_PAIRS",
]
