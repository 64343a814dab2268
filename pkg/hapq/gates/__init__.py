"""
Two-plane gates: schedules, synthesis from retained couplings and SWAP routing.
"""

from .routing import route_gate_count, route_unitary, swap_count, swap_route
from .schedules import (
    EvolutionStep,
    GateSchedule,
    RotationStep,
    chainwise_target,
    embed_two_spin,
    realize_schedule,
    schedule_to_text,
)
from .synthesis import (
    CNOT,
    cnot_from_coupling,
    cnot_schedule,
    locally_equivalent,
    makhlin_invariants,
    synthesize_entangler,
)

__all__ = [
    "GateSchedule",
    "RotationStep",
    "EvolutionStep",
    "realize_schedule",
    "chainwise_target",
    "embed_two_spin",
    "schedule_to_text",
    "CNOT",
    "synthesize_entangler",
    "cnot_from_coupling",
    "cnot_schedule",
    "makhlin_invariants",
    "locally_equivalent",
    "swap_route",
    "swap_count",
    "route_gate_count",
    "route_unitary",
]
