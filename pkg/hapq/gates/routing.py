"""
SWAP-chain routing of gates between planes farther apart than the direct coupling reach.
"""

import logging
import math

import numpy as np

from hapq.core.exceptions import GateError
from hapq.gates.schedules import GateSchedule, embed_two_spin
from hapq.gates.synthesis import Z_AXIS, cnot_from_coupling
from hapq.spins.operators import Operator

logger = logging.getLogger(__name__)

DEFAULT_REACH = 2
# Retained next-nearest-plane coupling magnitude used for nominal routing gates
NOMINAL_COUPLING_HZ = 375.0


def swap_count(plane_a: int, plane_b: int, reach: int = DEFAULT_REACH) -> int:
    """Number of SWAPs moving A within ``reach`` of B."""
    distance = abs(plane_b - plane_a)
    return max(0, math.ceil((distance - reach) / reach))


def route_gate_count(plane_a: int, plane_b: int, reach: int = DEFAULT_REACH) -> int:
    """CNOT count of a routed CNOT: three per SWAP there and back, plus the gate itself."""
    return 2 * 3 * swap_count(plane_a, plane_b, reach) + 1


def _swap(p: int, q: int, d_hz: float) -> list[GateSchedule]:
    return [
        cnot_from_coupling(p, q, d_hz, Z_AXIS, Z_AXIS),
        cnot_from_coupling(q, p, d_hz, Z_AXIS, Z_AXIS),
        cnot_from_coupling(p, q, d_hz, Z_AXIS, Z_AXIS),
    ]


def swap_route(
    plane_a: int,
    plane_b: int,
    reach: int = DEFAULT_REACH,
    n_planes: int | None = None,
    d_hz: float = NOMINAL_COUPLING_HZ,
) -> list[GateSchedule]:
    """
    CNOT from A to B as a chain of directly coupled CNOTs.

    A's state is swapped toward B in steps of ``reach`` planes until B is within reach,
    the CNOT is applied, and the swaps are undone in reverse order.

    Args:
        plane_a: Control plane
        plane_b: Target plane
        reach: Largest plane separation with a usable direct coupling
        n_planes: Number of planes in the device, for bounds checking
        d_hz: Coupling used for every direct CNOT

    Returns:
        Gate schedules in application order
    """
    if reach < 1:
        raise GateError(f"reach must be at least 1, got {reach}", planes=(plane_a, plane_b))
    if plane_a == plane_b:
        raise GateError("Control and target planes must differ", planes=(plane_a, plane_b))
    if min(plane_a, plane_b) < 0 or (n_planes is not None and max(plane_a, plane_b) >= n_planes):
        raise GateError(f"Planes must lie in [0, {n_planes})", planes=(plane_a, plane_b))

    step = reach if plane_b > plane_a else -reach
    swaps: list[list[GateSchedule]] = []
    current = plane_a
    for _ in range(swap_count(plane_a, plane_b, reach)):
        swaps.append(_swap(current, current + step, d_hz))
        current += step

    route = [gate for swap in swaps for gate in swap]
    route.append(cnot_from_coupling(current, plane_b, d_hz, Z_AXIS, Z_AXIS))
    for swap in reversed(swaps):
        route.extend(reversed(swap))
    logger.debug("Routed CNOT %d->%d through %d gates", plane_a, plane_b, len(route))
    return route


def route_unitary(route: list[GateSchedule], planes: list[int]) -> Operator:
    """Product of the routed gates' ideal targets on a register of one qubit per plane."""
    if not route:
        raise GateError("Empty route")
    index = {p: k for k, p in enumerate(planes)}
    n = len(planes)
    u = np.eye(2**n, dtype=complex)
    for gate in route:
        a, b = gate.planes_involved
        if a not in index or b not in index:
            raise GateError(f"Gate on planes {a},{b} outside the register {planes}", planes=(a, b))
        u = embed_two_spin(gate.ideal_target, index[a], index[b], n) @ u
    return Operator(u, "U_route")
