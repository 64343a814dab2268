"""
Gate schedules: ordered rotation and coupled-evolution steps with an ideal target.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from hapq.core.exceptions import GateError
from hapq.sequences.pulses import (
    IdealRotation,
    PulseSegment,
    single_spin_field,
    single_spin_rotation,
    single_spin_sum,
)
from hapq.sequences.textformat import format_segment
from hapq.spins.evolution import propagator
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import SINGLE_SPIN, Operator

logger = logging.getLogger(__name__)

Axis = tuple[float, float, float]

PAULI = (
    np.eye(2, dtype=complex),
    2.0 * SINGLE_SPIN["x"],
    2.0 * SINGLE_SPIN["y"],
    2.0 * SINGLE_SPIN["z"],
)


@dataclass(frozen=True)
class RotationStep:
    """Rotation of every spin in ``planes`` by ``angle`` about ``axis``."""

    planes: tuple[int, ...]
    axis: Axis
    angle: float

    @property
    def is_z(self) -> bool:
        return abs(abs(self.axis[2]) - 1.0) < 1e-12


@dataclass(frozen=True)
class EvolutionStep:
    """Free evolution under the retained coupling ``2*pi*D*(u_a.I_A)(u_b.I_B)``."""

    duration: float
    coupling_hz: float
    axes: tuple[Axis, Axis]
    planes: tuple[int, int]


Step = RotationStep | EvolutionStep


@dataclass
class GateSchedule:
    """A two-plane gate: steps in application order and the ideal 4x4 target."""

    steps: list[Step]
    ideal_target: np.ndarray
    planes_involved: tuple[int, int]
    name: str = ""
    notes: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        target = np.asarray(self.ideal_target, dtype=complex)
        if target.shape != (4, 4):
            raise GateError(f"Ideal target must be 4x4, got {target.shape}", planes=self.planes_involved)
        if np.max(np.abs(target.conj().T @ target - np.eye(4))) > 1e-10:
            raise GateError("Ideal target is not unitary", planes=self.planes_involved)
        if self.planes_involved[0] == self.planes_involved[1]:
            raise GateError("A two-plane gate needs two distinct planes", planes=self.planes_involved)
        self.ideal_target = target

    @property
    def gate_time(self) -> float:
        """Total coupled-evolution time (ideal rotations take no time)."""
        return float(sum(step.duration for step in self.steps if isinstance(step, EvolutionStep)))


SWAP_4 = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def axis_operator_2x2(axis: Axis | np.ndarray) -> np.ndarray:
    u = np.asarray(axis, dtype=float)
    return u[0] * SINGLE_SPIN["x"] + u[1] * SINGLE_SPIN["y"] + u[2] * SINGLE_SPIN["z"]


def embed_two_spin(gate: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Embed a 4x4 gate acting on spins ``i`` (first factor) and ``j`` (second) into ``n`` spins."""
    if i == j:
        raise GateError(f"Cannot embed a two-spin gate on a single spin {i}")
    result = np.zeros((2**n, 2**n), dtype=complex)
    for p in PAULI:
        for q in PAULI:
            c = np.trace(np.kron(p, q).conj().T @ gate) / 4.0
            if abs(c) < 1e-15:
                continue
            factors = [np.eye(2, dtype=complex)] * n
            factors[i], factors[j] = p, q
            term = np.array([[1.0]], dtype=complex)
            for f in factors:
                term = np.kron(term, f)
            result += c * term
    return result


def _single_spin_layer(local: np.ndarray, spins: set[int], n: int) -> np.ndarray:
    matrix = np.array([[1.0]], dtype=complex)
    for k in range(n):
        matrix = np.kron(matrix, local if k in spins else np.eye(2, dtype=complex))
    return matrix


def _pair_evolution(step: EvolutionStep) -> np.ndarray:
    a = axis_operator_2x2(step.axes[0])
    b = axis_operator_2x2(step.axes[1])
    h = Operator(2.0 * math.pi * step.coupling_hz * np.kron(a, b), "H_AB")
    return propagator(h, step.duration).matrix


def _finite_rotation(
    step: RotationStep, model: SpinSystemModel, hamiltonian: Operator | None, amplitude_hz: float
) -> np.ndarray:
    """
    Finite selective pulse in the frame of the (first) target plane.

    Other planes see the same rf at their gradient offset; their frame phase accumulated
    during the pulse is removed afterwards so only off-resonant excitation remains.
    """
    if abs(step.axis[2]) > 1e-12:
        raise GateError(f"Finite pulses rotate about in-plane axes only, got {step.axis}", planes=step.planes)
    angle, phase = abs(step.angle), math.atan2(step.axis[1], step.axis[0])
    if step.angle < 0:
        phase += math.pi
    duration = angle / (2.0 * math.pi * amplitude_hz)
    reference = model.plane_offset_hz(step.planes[0])
    local_h, frame = [], []
    for site in model.sites:
        offset = model.plane_offset_hz(site.plane_index) - reference
        on_target = site.plane_index in step.planes
        detuning = 0.0 if on_target else offset
        local_h.append(
            single_spin_field(np.array([amplitude_hz * math.cos(phase), amplitude_hz * math.sin(phase), detuning]))
        )
        frame.append(single_spin_rotation(-2.0 * math.pi * detuning * duration, (0.0, 0.0, 1.0)))
    h = single_spin_sum(local_h)
    if hamiltonian is not None:
        h = h + hamiltonian.matrix
    u = propagator(Operator(h, "H_pulse"), duration).matrix
    correction = np.array([[1.0]], dtype=complex)
    for f in frame:
        correction = np.kron(correction, f)
    return correction @ u


def realize_schedule(
    schedule: GateSchedule,
    model: SpinSystemModel | None = None,
    hamiltonian: Operator | None = None,
    finite_pulse_hz: float | None = None,
    evolution: Callable[[float], Operator] | None = None,
) -> Operator:
    """
    Propagator of a schedule.

    Without a model the schedule acts on a two-spin register ordered as
    ``planes_involved``. With a model, rotations act on every spin of their planes and
    evolution steps use ``evolution`` when given (e.g. the exact stroboscopic propagator
    of a recoupling sequence), then ``hamiltonian`` (e.g. a recoupled average
    Hamiltonian), otherwise the ideal retained coupling on every chain present in both
    planes.

    Args:
        schedule: Gate schedule
        model: Spin cluster
        hamiltonian: Hamiltonian (rad/s) governing evolution steps and finite pulses
        finite_pulse_hz: Replace non-z ideal rotations by finite selective pulses of this amplitude
        evolution: Propagator of the cluster for an evolution time in seconds

    Returns:
        The realized unitary
    """
    if finite_pulse_hz is not None and finite_pulse_hz <= 0:
        raise GateError(f"finite_pulse_hz must be positive, got {finite_pulse_hz}")
    if model is None:
        if hamiltonian is not None or finite_pulse_hz is not None or evolution is not None:
            raise GateError("A Hamiltonian, an evolution or finite pulses need a spin model")
        plane_index = {p: k for k, p in enumerate(schedule.planes_involved)}
        u = np.eye(4, dtype=complex)
        for step in schedule.steps:
            if isinstance(step, RotationStep):
                spins = {plane_index[p] for p in step.planes}
                u = _single_spin_layer(single_spin_rotation(step.angle, step.axis), spins, 2) @ u
            else:
                pair = _pair_evolution(step)
                if step.planes != schedule.planes_involved:
                    pair = SWAP_4 @ pair @ SWAP_4
                u = pair @ u
        return Operator(u, f"U[{schedule.name}]")

    present = set(model.planes())
    missing = sorted(set(schedule.planes_involved) - present)
    if missing:
        raise GateError(f"Schedule planes {missing} are absent from the model", planes=schedule.planes_involved)
    n = model.n
    logger.debug(
        "Realizing %s on %d spins (evolution=%s, hamiltonian=%s, finite_pulse_hz=%s)",
        schedule.name, n, evolution is not None, hamiltonian is not None, finite_pulse_hz,
    )
    u = np.eye(2**n, dtype=complex)
    for step in schedule.steps:
        if isinstance(step, RotationStep):
            if finite_pulse_hz is not None and not step.is_z:
                layer = _finite_rotation(step, model, hamiltonian, finite_pulse_hz)
            else:
                spins = {k for p in step.planes for k in model.spins_in_plane(p)}
                layer = _single_spin_layer(single_spin_rotation(step.angle, step.axis), spins, n)
        elif evolution is not None:
            layer = evolution(step.duration).matrix
        elif hamiltonian is not None:
            layer = propagator(hamiltonian, step.duration).matrix
        else:
            pair = _pair_evolution(step)
            layer = np.eye(2**n, dtype=complex)
            for i, j in chain_pairs(model, *step.planes):
                layer = embed_two_spin(pair, i, j, n) @ layer
        u = layer @ u
    return Operator(u, f"U[{schedule.name}]")


def chain_pairs(model: SpinSystemModel, plane_a: int, plane_b: int) -> list[tuple[int, int]]:
    """Spin indices ``(a, b)`` of every chain present in both planes."""
    pairs = []
    for chain in model.chains():
        a, b = model.spin_at(plane_a, chain), model.spin_at(plane_b, chain)
        if a is not None and b is not None:
            pairs.append((a, b))
    return pairs


def chainwise_target(schedule: GateSchedule, model: SpinSystemModel) -> Operator:
    """The ideal target applied to every chain present in both planes, identity elsewhere."""
    plane_a, plane_b = schedule.planes_involved
    pairs = chain_pairs(model, plane_a, plane_b)
    if not pairs:
        raise GateError(f"No chain has spins in both planes {plane_a} and {plane_b}", planes=schedule.planes_involved)
    u = np.eye(2**model.n, dtype=complex)
    for i, j in pairs:
        u = embed_two_spin(schedule.ideal_target, i, j, model.n) @ u
    return Operator(u, f"target[{schedule.name}]")


def schedule_to_text(schedule: GateSchedule) -> str:
    """
    Serialize a schedule in the sequence text format, with a header naming the target and planes.

    Evolution steps appear as free-evolution segments annotated with their coupling.
    """
    target = ";".join(" ".join(repr(complex(v)) for v in row) for row in schedule.ideal_target)
    lines = [
        f"# schedule name={schedule.name or 'unnamed'} planes={schedule.planes_involved[0]} {schedule.planes_involved[1]}",
        f"# ideal_target={target}",
    ]
    for step in schedule.steps:
        if isinstance(step, RotationStep):
            segment = PulseSegment(0.0, rotation=IdealRotation(step.angle, step.axis, step.planes))
            lines.append(format_segment(segment))
        else:
            axes = " ".join(repr(float(c)) for c in step.axes[0]) + " / " + " ".join(repr(float(c)) for c in step.axes[1])
            lines.append(
                f"{format_segment(PulseSegment(step.duration))} "
                f"# coupling_hz={step.coupling_hz!r} planes={step.planes[0]} {step.planes[1]} axes={axes}"
            )
    return "\n".join(lines) + "\n"
