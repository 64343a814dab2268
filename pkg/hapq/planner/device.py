"""
Device-capacity arithmetic: plane splitting, addressable planes, physical limits, overlap.
"""

import logging
import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from hapq.core.config import DeviceConfig, LatticeConfig
from hapq.core.exceptions import PlannerError
from hapq.sequences.averaging import RecouplingSummary
from hapq.structure.constants import CONSTANTS
from hapq.utils.exception_handler import handle_planner_exceptions
from hapq.utils.helpers import format_sig

logger = logging.getLogger(__name__)

# 1 G/cm = 1e-4 T / 1e-2 m
TESLA_PER_METRE_PER_GAUSS_PER_CM = 1e-2
# Floor guard so exact ratios such as 45 kHz / 300 Hz do not lose a plane to rounding
_FLOOR_EPS = 1e-9


class OverlapReport(BaseModel):
    """Resonance-overlap check of one addressing strategy."""

    model_config = ConfigDict(frozen=True)

    strategy: Literal["nn", "nnn"]
    broadening_hz: float
    splitting_hz: float
    threshold_hz: float
    passed: bool
    margin_hz: float


class DevicePlan(BaseModel):
    """Capacity and feasibility of a gradient-addressed plane device."""

    model_config = ConfigDict(frozen=True)

    gradient_t_per_m: float
    gradient_gauss_per_cm: float
    splitting_hz: float
    decoupling_bandwidth_hz: float
    addressable_planes: int
    sample_dims_m: tuple[float, float, float]
    physical_plane_limit: int
    spins_per_plane: float
    total_spins: float
    active_thickness_m: float
    overlap: OverlapReport
    feasible: bool
    issues: list[str] = Field(default_factory=list)


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise PlannerError(f"{name} must be positive and finite, got {value}", field=name)


def _floor_ratio(numerator: float, denominator: float) -> int:
    return int(math.floor(numerator / denominator * (1.0 + _FLOOR_EPS)))


def gauss_per_cm_to_tesla_per_metre(value: float) -> float:
    return value * TESLA_PER_METRE_PER_GAUSS_PER_CM


def plane_splitting_hz(gradient: float, chain_spacing: float) -> float:
    """
    Resonance difference between adjacent planes.

    Args:
        gradient: Field gradient in T/m
        chain_spacing: Plane spacing in m

    Returns:
        ``(gamma/2pi) * G * a`` in Hz
    """
    if gradient < 0:
        raise PlannerError(f"gradient must be nonnegative, got {gradient}", field="gradient")
    _require_positive(chain_spacing=chain_spacing)
    return CONSTANTS.gamma_over_2pi_hz_per_t * gradient * chain_spacing


def addressable_planes(bandwidth_hz: float, splitting_hz: float) -> int:
    """Contiguous planes inside the decoupling bandwidth: ``floor(bandwidth / splitting)``."""
    _require_positive(bandwidth_hz=bandwidth_hz, splitting_hz=splitting_hz)
    return _floor_ratio(bandwidth_hz, splitting_hz)


def physical_plane_limit(sample_thickness: float, chain_spacing: float) -> int:
    """Planes along the field axis: ``floor(thickness / spacing)``."""
    _require_positive(sample_thickness=sample_thickness, chain_spacing=chain_spacing)
    return _floor_ratio(sample_thickness, chain_spacing)


def spins_per_plane(sample_width: float, sample_depth: float, chain_separation: float) -> float:
    """
    Hydrogens per plane for hexagonally packed chains, one per chain per plane.

    Args:
        sample_width: Lateral dimension in m
        sample_depth: Lateral dimension in m
        chain_separation: Nearest-neighbour chain distance in m

    Returns:
        ``area / (sqrt(3)/2 * s^2)``
    """
    _require_positive(sample_width=sample_width, sample_depth=sample_depth, chain_separation=chain_separation)
    return sample_width * sample_depth / (math.sqrt(3.0) / 2.0 * chain_separation**2)


def overlap_check(strategy: str, broadening_hz: float, splitting_hz: float) -> OverlapReport:
    """
    Check that dipolar broadening stays below the resonance separation.

    Nearest-plane addressing needs broadening below the splitting; next-nearest addressing,
    with the intermediate plane decoupled, needs it below twice the splitting.

    Raises:
        PlannerError: Unknown strategy or negative inputs
    """
    if strategy not in ("nn", "nnn"):
        raise PlannerError(f"Unknown addressing strategy {strategy!r} (expected nn or nnn)", field="strategy")
    if broadening_hz < 0 or splitting_hz < 0:
        raise PlannerError("broadening and splitting must be nonnegative", field="broadening")
    threshold = splitting_hz if strategy == "nn" else 2.0 * splitting_hz
    return OverlapReport(
        strategy=strategy,  # type: ignore[arg-type]
        broadening_hz=broadening_hz,
        splitting_hz=splitting_hz,
        threshold_hz=threshold,
        passed=broadening_hz < threshold,
        margin_hz=threshold - broadening_hz,
    )


@handle_planner_exceptions
def device_plan(
    device: DeviceConfig,
    lattice: LatticeConfig | None = None,
    recoupling: RecouplingSummary | None = None,
    broadening_hz: float | None = None,
) -> DevicePlan:
    """
    Aggregate the capacity arithmetic into a device plan.

    The broadening used for the overlap check is, in order of preference,
    ``broadening_hz``, the retained coupling of ``recoupling``, then ``device.broadening``.

    Args:
        device: Device section (validated, so every key is present)
        lattice: Lattice section supplying spacing and separation
        recoupling: Recoupling summary whose ``|D_AB|`` sets the broadening
        broadening_hz: Explicit broadening override

    Returns:
        The plan; ``feasible`` is False and ``issues`` explains why when a check fails

    Raises:
        PlannerError: If no broadening is available
    """
    lattice = lattice or LatticeConfig()
    if broadening_hz is None and recoupling is not None:
        broadening_hz = abs(recoupling.d_ab_hz)
    if broadening_hz is None:
        broadening_hz = device.broadening
    if broadening_hz is None:
        raise PlannerError("No dipolar broadening available: set device.broadening", field="device.broadening")

    issues: list[str] = []
    splitting = plane_splitting_hz(device.gradient, lattice.chain_spacing)
    if splitting > 0:
        n_addressable = _floor_ratio(device.bandwidth, splitting)
    else:
        n_addressable = 0
        issues.append("zero gradient: planes are not frequency-resolved")
    if n_addressable < 1 and splitting > 0:
        issues.append(
            f"decoupling bandwidth {format_sig(device.bandwidth)} Hz is below the plane splitting "
            f"{format_sig(splitting)} Hz"
        )

    limit = physical_plane_limit(device.sample_thickness, lattice.chain_spacing)
    if n_addressable > limit:
        issues.append(f"{n_addressable} addressable planes exceed the {limit} planes in the sample")
    per_plane = spins_per_plane(device.sample_width, device.sample_depth, lattice.chain_separation)
    overlap = overlap_check(device.strategy, broadening_hz, splitting)
    if not overlap.passed:
        issues.append(
            f"{device.strategy} overlap check failed: broadening {format_sig(broadening_hz)} Hz "
            f">= threshold {format_sig(overlap.threshold_hz)} Hz"
        )

    plan = DevicePlan(
        gradient_t_per_m=device.gradient,
        gradient_gauss_per_cm=device.gradient / TESLA_PER_METRE_PER_GAUSS_PER_CM,
        splitting_hz=splitting,
        decoupling_bandwidth_hz=device.bandwidth,
        addressable_planes=n_addressable,
        sample_dims_m=(device.sample_thickness, device.sample_width, device.sample_depth),
        physical_plane_limit=limit,
        spins_per_plane=per_plane,
        total_spins=limit * per_plane,
        active_thickness_m=n_addressable * lattice.chain_spacing,
        overlap=overlap,
        feasible=not issues,
        issues=issues,
    )
    logger.info(
        "Plan: splitting %.4g Hz, %d addressable planes, feasible=%s", splitting, n_addressable, plan.feasible
    )
    return plan


def plan_to_text(plan: DevicePlan) -> str:
    """Flat ``key = value`` report, six significant digits."""
    lines = []
    for key, value in plan.model_dump().items():
        if key == "overlap":
            for sub_key, sub_value in value.items():
                lines.append(f"overlap.{sub_key} = {sub_value if isinstance(sub_value, str) else format_sig(sub_value)}")
        elif key == "sample_dims_m":
            lines.append(f"{key} = {' '.join(format_sig(v) for v in value)}")
        elif key == "issues":
            lines.append(f"issues = {'; '.join(value) if value else 'none'}")
        else:
            lines.append(f"{key} = {format_sig(value)}")
    return "\n".join(lines) + "\n"
