"""
Spin system model: a small cluster of lattice sites with couplings and gradient offsets.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from hapq.core.exceptions import ValidationError
from hapq.spins.operators import check_spin_count
from hapq.structure.constants import CONSTANTS
from hapq.structure.couplings import CouplingTable, coupling_table
from hapq.structure.lattice import LatticeSpec, SpinSite, build_lattice, select_sites

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpinSystemModel:
    """
    A cluster of at most 14 spins.

    Site ids are remapped to Hilbert-space indices in ascending id order; ``couplings``
    refer to site ids, ``index_of`` converts them.
    """

    sites: tuple[SpinSite, ...]
    couplings: CouplingTable
    gradient: float = 0.0
    carrier_plane: int = 0
    field_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    chain_spacing: float = 3.44e-10
    index_of: dict[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        check_spin_count(len(self.sites))
        ordered = tuple(sorted(self.sites, key=lambda s: s.id))
        object.__setattr__(self, "sites", ordered)
        index = {site.id: k for k, site in enumerate(ordered)}
        if len(index) != len(ordered):
            raise ValidationError("Site ids must be unique", field="sites")
        object.__setattr__(self, "index_of", index)

        for entry in self.couplings:
            if entry.i not in index or entry.j not in index:
                raise ValidationError(f"Coupling ({entry.i}, {entry.j}) references a site outside the model", field="couplings")
        if self.gradient < 0 or not math.isfinite(self.gradient):
            raise ValidationError(f"Gradient must be finite and nonnegative, got {self.gradient}", field="gradient")

    @property
    def n(self) -> int:
        return len(self.sites)

    @classmethod
    def from_lattice(
        cls,
        spec: LatticeSpec,
        planes: list[int] | None = None,
        chains: list[int] | None = None,
        gradient: float = 0.0,
        carrier_plane: int = 0,
        cutoff_hz: float = 0.0,
    ) -> "SpinSystemModel":
        """
        Build a model from a lattice, optionally restricted to some planes and chains.

        Args:
            spec: Lattice geometry
            planes: Plane indices to keep (all if None)
            chains: Chain indices to keep (all if None)
            gradient: Field gradient in T/m along the field axis
            carrier_plane: Plane whose resonance is the rotating-frame carrier
            cutoff_hz: Coupling cutoff

        Returns:
            The spin system model
        """
        sites = select_sites(build_lattice(spec), planes, chains)
        if not sites:
            raise ValidationError("Cluster selection contains no sites", field="planes")
        table = coupling_table(sites, spec.field_axis, cutoff_hz)
        logger.debug(f"Model with {len(sites)} spins and {len(table)} couplings (cutoff {cutoff_hz} Hz)")
        return cls(
            sites=tuple(sites),
            couplings=table,
            gradient=gradient,
            carrier_plane=carrier_plane,
            field_axis=spec.field_axis,
            chain_spacing=spec.chain_spacing,
        )

    def offsets_hz(self) -> np.ndarray:
        """Resonance offset of every spin from the carrier plane, in Hz."""
        axis = np.asarray(self.field_axis, dtype=float)
        carrier_height = self.carrier_plane * self.chain_spacing
        heights = np.array([np.dot(site.vector, axis) for site in self.sites])
        return CONSTANTS.gamma_over_2pi_hz_per_t * self.gradient * (heights - carrier_height)

    def plane_offset_hz(self, plane: int) -> float:
        """Resonance offset of a plane from the carrier, in Hz."""
        return CONSTANTS.gamma_over_2pi_hz_per_t * self.gradient * (plane - self.carrier_plane) * self.chain_spacing

    def planes(self) -> list[int]:
        return sorted({site.plane_index for site in self.sites})

    def chains(self) -> list[int]:
        return sorted({site.chain_id for site in self.sites})

    def spins_in_plane(self, plane: int) -> list[int]:
        """Hilbert-space indices of the spins on ``plane``."""
        return [k for k, site in enumerate(self.sites) if site.plane_index == plane]

    def spin_at(self, plane: int, chain: int) -> int | None:
        for k, site in enumerate(self.sites):
            if site.plane_index == plane and site.chain_id == chain:
                return k
        return None

    def indexed_couplings(self) -> list[tuple[int, int, float]]:
        """Couplings as ``(index_i, index_j, d_hz)`` with Hilbert-space indices."""
        return [(self.index_of[e.i], self.index_of[e.j], e.d_hz) for e in self.couplings]
