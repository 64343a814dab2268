"""
Hydrogen site positions for hydroxyapatite chain clusters.

The hydroxyl protons form one-dimensional chains parallel to the external field, with
neighbouring chains arranged on an idealized regular hexagon around a central chain.
Positions are metres; plane ``k`` of every chain sits at ``k * chain_spacing`` along the
field axis.
"""

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from hapq.core.exceptions import DegeneratePairError
from hapq.structure.constants import ANGSTROM

logger = logging.getLogger(__name__)

ChainPattern = Literal["single", "central_plus_six_hex", "explicit"]


class LatticeSpec(BaseModel):
    """Geometry of a chain cluster."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    chain_spacing: float = Field(default=3.44 * ANGSTROM, gt=0.0)
    chain_separation: float = Field(default=9.42 * ANGSTROM, gt=0.0)
    n_planes: int = Field(default=1, ge=1)
    chain_pattern: ChainPattern = Field(default="single")
    chain_offsets: tuple[tuple[float, float], ...] = Field(default=())
    field_axis: tuple[float, float, float] = Field(default=(0.0, 0.0, 1.0))

    @field_validator("field_axis")
    @classmethod
    def _unit_axis(cls, value: tuple[float, float, float]) -> tuple[float, float, float]:
        if abs(math.sqrt(sum(c * c for c in value)) - 1.0) > 1e-12:
            raise ValueError("field_axis must have unit norm")
        return value

    @model_validator(mode="after")
    def _offsets_match_pattern(self) -> "LatticeSpec":
        if self.chain_pattern != "explicit" and self.chain_offsets:
            raise ValueError("chain_offsets are only allowed with the explicit chain pattern")
        return self

    @property
    def n_chains(self) -> int:
        """Number of chains in the cluster."""
        return len(self.resolved_offsets())

    def resolved_offsets(self) -> list[tuple[float, float]]:
        """2D chain offsets (metres) in the plane perpendicular to the field."""
        if self.chain_pattern == "single":
            return [(0.0, 0.0)]
        if self.chain_pattern == "central_plus_six_hex":
            s = self.chain_separation
            return [(0.0, 0.0)] + [(s * math.cos(k * math.pi / 3), s * math.sin(k * math.pi / 3)) for k in range(6)]
        return [tuple(offset) for offset in self.chain_offsets]  # type: ignore[misc]


@dataclass(frozen=True)
class SpinSite:
    """A hydrogen site of the lattice."""

    id: int
    chain_id: int
    plane_index: int
    position: tuple[float, float, float]

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.position, dtype=float)


def transverse_basis(field_axis: tuple[float, float, float]) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal pair spanning the plane perpendicular to ``field_axis``."""
    axis = np.asarray(field_axis, dtype=float)
    if abs(axis[2]) > 1.0 - 1e-12:
        # Field along +z or -z: keep the lab x/y axes
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e1 = np.cross(np.array([0.0, 0.0, 1.0]), axis)
        e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2


def build_lattice(spec: LatticeSpec) -> list[SpinSite]:
    """
    Generate every site of the cluster.

    Ids are assigned plane-major, then chain: ``id = plane * n_chains + chain``.

    Args:
        spec: Lattice geometry

    Returns:
        ``n_planes * n_chains`` sites
    """
    axis = np.asarray(spec.field_axis, dtype=float)
    e1, e2 = transverse_basis(spec.field_axis)
    offsets = spec.resolved_offsets()

    sites = []
    for plane in range(spec.n_planes):
        for chain, (ox, oy) in enumerate(offsets):
            position = plane * spec.chain_spacing * axis + ox * e1 + oy * e2
            sites.append(
                SpinSite(
                    id=plane * len(offsets) + chain,
                    chain_id=chain,
                    plane_index=plane,
                    position=tuple(float(c) for c in position),  # type: ignore[arg-type]
                )
            )

    logger.debug(f"Built lattice with {len(sites)} sites ({spec.n_planes} planes x {len(offsets)} chains)")
    return sites


def pair_geometry(a: SpinSite, b: SpinSite, field_axis: tuple[float, float, float]) -> tuple[float, float]:
    """
    Distance and polar angle of the internuclear vector.

    Args:
        a: First site
        b: Second site
        field_axis: Unit vector of the external field

    Returns:
        ``(r, theta)`` with r in metres and theta in [0, pi]

    Raises:
        DegeneratePairError: If the two positions coincide
    """
    delta = b.vector - a.vector
    r = float(np.linalg.norm(delta))
    if r == 0.0:
        raise DegeneratePairError(f"Sites {a.id} and {b.id} coincide", site=f"{a.id},{b.id}")
    cos_theta = float(np.dot(delta, np.asarray(field_axis, dtype=float)) / r)
    return r, math.acos(max(-1.0, min(1.0, cos_theta)))


def select_sites(
    sites: list[SpinSite], planes: list[int] | None = None, chains: list[int] | None = None
) -> list[SpinSite]:
    """Restrict a lattice to the given planes and chains, preserving id order."""
    return [
        site
        for site in sites
        if (planes is None or site.plane_index in planes) and (chains is None or site.chain_id in chains)
    ]


def sites_to_csv(sites: list[SpinSite], path: str | Path) -> None:
    """Write sites as CSV with columns id, chain_id, plane_index, x_m, y_m, z_m."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["id", "chain_id", "plane_index", "x_m", "y_m", "z_m"])
        for site in sites:
            writer.writerow([site.id, site.chain_id, site.plane_index, *(repr(c) for c in site.position)])
