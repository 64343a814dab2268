"""
Secular dipolar couplings between lattice sites.

The reported coupling ``d`` (Hz) is the coefficient of the secular pair Hamiltonian
``2*pi*d*(3 IzIz - I.I)`` in angular-frequency units::

    d = (mu0/4pi) * gamma^2 * hbar * (3cos^2(theta) - 1) / (2 * 2pi * r^3)

This single convention reproduces the four coupling magnitudes quoted for hydroxyapatite
(about 3 kHz, 375 Hz, 73 Hz and 2 Hz) from geometry alone; see docs/coupling_convention.md.
"""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path

from hapq.core.exceptions import CouplingError
from hapq.structure.constants import ANGSTROM, CONSTANTS, PhysicalConstants
from hapq.structure.lattice import SpinSite, pair_geometry

logger = logging.getLogger(__name__)


def dipolar_coupling_hz(r: float, theta: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """
    Signed secular dipolar coupling for a homonuclear 1H pair.

    Args:
        r: Internuclear distance in metres
        theta: Angle between the internuclear vector and the field, radians
        constants: Physical constants

    Returns:
        Coupling in Hz (positive below the magic angle)

    Raises:
        CouplingError: If r is not positive
    """
    if not r > 0.0:
        raise CouplingError(f"Internuclear distance must be positive, got {r!r}")
    prefactor = constants.mu0_over_4pi * constants.gamma_H**2 * constants.hbar / (2.0 * math.pi * r**3)
    return prefactor * (3.0 * math.cos(theta) ** 2 - 1.0) / 2.0


@dataclass(frozen=True)
class CouplingEntry:
    """One coupled pair, ``i < j``."""

    i: int
    j: int
    d_hz: float
    r: float
    theta: float


@dataclass(frozen=True)
class CouplingTable:
    """Pairwise couplings above a cutoff, sorted by descending magnitude."""

    entries: tuple[CouplingEntry, ...]
    cutoff_hz: float
    warning: str | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def max_abs_hz(self) -> float:
        """Largest coupling magnitude (0 for an empty table)."""
        return max((abs(e.d_hz) for e in self.entries), default=0.0)

    def lookup(self, i: int, j: int) -> CouplingEntry | None:
        a, b = min(i, j), max(i, j)
        for entry in self.entries:
            if entry.i == a and entry.j == b:
                return entry
        return None

    def without(self, predicate) -> "CouplingTable":
        """Copy of the table with the entries matching ``predicate`` dropped."""
        return CouplingTable(tuple(e for e in self.entries if not predicate(e)), self.cutoff_hz, self.warning)


def coupling_table(
    sites: list[SpinSite], field_axis: tuple[float, float, float] = (0.0, 0.0, 1.0), cutoff_hz: float = 0.0
) -> CouplingTable:
    """
    Assemble the coupling table of a site list.

    Args:
        sites: Lattice sites
        field_axis: Unit vector of the external field
        cutoff_hz: Pairs with ``|d| < cutoff_hz`` are dropped

    Returns:
        Table sorted by descending ``|d|``, ties broken by ``(i, j)``
    """
    if cutoff_hz < 0:
        raise CouplingError(f"cutoff_hz must be nonnegative, got {cutoff_hz}")
    if len(sites) < 2:
        message = f"coupling table needs at least 2 sites, got {len(sites)}"
        logger.warning(message)
        return CouplingTable(entries=(), cutoff_hz=cutoff_hz, warning=message)

    entries = []
    ordered = sorted(sites, key=lambda s: s.id)
    for a_index, a in enumerate(ordered):
        for b in ordered[a_index + 1 :]:
            r, theta = pair_geometry(a, b, field_axis)
            d = dipolar_coupling_hz(r, theta)
            if abs(d) >= cutoff_hz:
                entries.append(CouplingEntry(i=a.id, j=b.id, d_hz=d, r=r, theta=theta))

    entries.sort(key=lambda e: (-abs(e.d_hz), e.i, e.j))
    return CouplingTable(entries=tuple(entries), cutoff_hz=cutoff_hz)


def coupling_table_to_csv(table: CouplingTable, path: str | Path) -> None:
    """Write the table as CSV with columns i, j, d_hz, r_m, theta_rad."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["i", "j", "d_hz", "r_m", "theta_rad"])
        for e in table.entries:
            writer.writerow([e.i, e.j, f"{e.d_hz:.6g}", f"{e.r:.6g}", f"{e.theta:.6g}"])


@dataclass(frozen=True)
class ReferencePair:
    """A pair geometry whose coupling magnitude is quoted for hydroxyapatite."""

    label: str
    r: float
    theta: float
    quoted_hz: float
    rel_tolerance: float


def _reference_pairs() -> tuple[ReferencePair, ...]:
    a, s = 3.44 * ANGSTROM, 9.42 * ANGSTROM
    diagonal = math.hypot(s, 2 * a)
    return (
        ReferencePair("intra-chain nn (nn planes)", a, 0.0, 3000.0, 0.05),
        ReferencePair("nn among nnn planes", 2 * a, 0.0, 375.0, 0.02),
        ReferencePair("nn within a plane", s, math.pi / 2, 73.0, 0.03),
        ReferencePair("nnn among nnn planes", diagonal, math.acos(2 * a / diagonal), 2.0, 0.30),
    )


REFERENCE_PAIRS = _reference_pairs()


@dataclass(frozen=True)
class ReferenceRow:
    label: str
    computed_hz: float
    quoted_hz: float
    relative_error: float
    within_tolerance: bool


def reference_coupling_rows() -> list[ReferenceRow]:
    """Computed vs quoted coupling for each reference geometry."""
    rows = []
    for pair in REFERENCE_PAIRS:
        d = dipolar_coupling_hz(pair.r, pair.theta)
        rel = abs(abs(d) - pair.quoted_hz) / pair.quoted_hz
        rows.append(ReferenceRow(pair.label, d, pair.quoted_hz, rel, rel <= pair.rel_tolerance))
    return rows
