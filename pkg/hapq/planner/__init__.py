"""
Device planning: capacity arithmetic and resonance-overlap feasibility.
"""

from .device import (
    DevicePlan,
    OverlapReport,
    addressable_planes,
    device_plan,
    overlap_check,
    physical_plane_limit,
    plan_to_text,
    plane_splitting_hz,
    spins_per_plane,
)

__all__ = [
    "DevicePlan",
    "OverlapReport",
    "plane_splitting_hz",
    "addressable_planes",
    "physical_plane_limit",
    "spins_per_plane",
    "overlap_check",
    "device_plan",
    "plan_to_text",
]
