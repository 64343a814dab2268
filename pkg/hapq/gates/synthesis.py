"""
Two-plane gate synthesis from a retained product coupling.
"""

import logging
import math

import numpy as np

from hapq.core.exceptions import GateError
from hapq.gates.schedules import Axis, EvolutionStep, GateSchedule, RotationStep, axis_operator_2x2
from hapq.sequences.averaging import EffectiveHamiltonianReport, RecouplingSummary, summarize_recoupling
from hapq.spins.evolution import propagator
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import Operator

logger = logging.getLogger(__name__)

X_AXIS: Axis = (1.0, 0.0, 0.0)
Y_AXIS: Axis = (0.0, 1.0, 0.0)
Z_AXIS: Axis = (0.0, 0.0, 1.0)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
CZ = np.diag([1, 1, 1, -1]).astype(complex)

MAGIC_BASIS = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex
) / math.sqrt(2.0)


def _unit(axis: Axis | np.ndarray) -> np.ndarray:
    u = np.asarray(axis, dtype=float)
    norm = float(np.linalg.norm(u))
    if norm == 0.0:
        raise GateError("Coupling axis must be nonzero")
    return u / norm


def _check_coupling(d_ab_hz: float) -> None:
    if not math.isfinite(d_ab_hz) or d_ab_hz == 0.0:
        raise GateError(f"A nonzero finite retained coupling is required, got {d_ab_hz} Hz")


def entangler_time(d_ab_hz: float) -> float:
    """``1 / (2 |D|)``: the time giving a quarter-turn conditional phase."""
    _check_coupling(d_ab_hz)
    return 1.0 / (2.0 * abs(d_ab_hz))


def synthesize_entangler(
    d_ab_hz: float, axes: tuple[Axis, Axis] = (X_AXIS, X_AXIS), planes: tuple[int, int] = (0, 1)
) -> GateSchedule:
    """
    Maximally entangling evolution under a retained ``D (u_a.I_A)(u_b.I_B)`` coupling.

    Evolving for ``1/(2|D|)`` gives ``exp(-/+ i pi/4 (u_a.sigma)(u_b.sigma))``, the sign
    following the sign of ``D``.

    Args:
        d_ab_hz: Retained coupling in Hz
        axes: Unit axes of the A and B operators
        planes: Planes (A, B)

    Returns:
        Single evolution step whose ideal target is the entangler itself
    """
    u_a, u_b = _unit(axes[0]), _unit(axes[1])
    t = entangler_time(d_ab_hz)
    h = Operator(2.0 * math.pi * d_ab_hz * np.kron(axis_operator_2x2(u_a), axis_operator_2x2(u_b)), "H_AB")
    target = propagator(h, t).matrix
    step = EvolutionStep(t, d_ab_hz, (tuple(u_a), tuple(u_b)), tuple(planes))  # type: ignore[arg-type]
    sign = 1.0 if d_ab_hz > 0 else -1.0
    return GateSchedule([step], target, tuple(planes), name="entangler", notes={"sign": sign, "gate_time_s": t})  # type: ignore[arg-type]


def rotation_to_z(axis: Axis | np.ndarray) -> tuple[Axis, float]:
    """Rotation ``(k, beta)`` carrying ``axis`` onto +z; ``beta`` is 0 when already aligned."""
    n = _unit(axis)
    k = np.cross(n, np.array(Z_AXIS))
    sin_beta, cos_beta = float(np.linalg.norm(k)), float(n[2])
    if sin_beta < 1e-12:
        return (X_AXIS, 0.0) if cos_beta > 0 else (X_AXIS, math.pi)
    return tuple(k / sin_beta), math.atan2(sin_beta, cos_beta)  # type: ignore[return-value]


def cnot_from_coupling(
    plane_a: int, plane_b: int, d_ab_hz: float, axis_a: Axis = Z_AXIS, axis_b: Axis = Z_AXIS
) -> GateSchedule:
    """
    CNOT (control A, target B) built from a retained product coupling.

    The retained axes are rotated onto z on both planes, the resulting ``IzIz`` evolution
    plus z rotations gives CZ, and y rotations on B turn CZ into CNOT::

        CNOT = Ry_B(pi/2) Rz_A(-s pi/2) Rz_B(-s pi/2) V exp(-i 2 pi D t nA.I nB.I) V† Ry_B(-pi/2)

    with ``s = sign(D)`` and ``V`` mapping each retained axis onto z. Equal to CNOT up to a
    global phase.
    """
    _check_coupling(d_ab_hz)
    if plane_a == plane_b:
        raise GateError("Control and target planes must differ", planes=(plane_a, plane_b))
    s = 1.0 if d_ab_hz > 0 else -1.0
    k_a, beta_a = rotation_to_z(axis_a)
    k_b, beta_b = rotation_to_z(axis_b)

    steps: list[RotationStep | EvolutionStep] = [RotationStep((plane_b,), Y_AXIS, -math.pi / 2)]
    if beta_a:
        steps.append(RotationStep((plane_a,), k_a, -beta_a))
    if beta_b:
        steps.append(RotationStep((plane_b,), k_b, -beta_b))
    steps.append(
        EvolutionStep(entangler_time(d_ab_hz), d_ab_hz, (tuple(_unit(axis_a)), tuple(_unit(axis_b))), (plane_a, plane_b))  # type: ignore[arg-type]
    )
    if beta_a:
        steps.append(RotationStep((plane_a,), k_a, beta_a))
    if beta_b:
        steps.append(RotationStep((plane_b,), k_b, beta_b))
    steps.extend(
        [
            RotationStep((plane_a,), Z_AXIS, -s * math.pi / 2),
            RotationStep((plane_b,), Z_AXIS, -s * math.pi / 2),
            RotationStep((plane_b,), Y_AXIS, math.pi / 2),
        ]
    )
    return GateSchedule(
        steps,
        CNOT,
        (plane_a, plane_b),
        name=f"cnot({plane_a}->{plane_b})",
        notes={"sign": s, "d_ab_hz": d_ab_hz, "gate_time_s": entangler_time(d_ab_hz)},
    )


def cnot_schedule(
    plane_a: int,
    plane_b: int,
    model: SpinSystemModel,
    recoupling: EffectiveHamiltonianReport | RecouplingSummary,
) -> GateSchedule:
    """
    CNOT between two planes from the coupling retained by a recoupling sequence.

    Args:
        plane_a: Control plane
        plane_b: Target plane
        model: Spin cluster the recoupling was averaged over
        recoupling: Average Hamiltonian report or its recoupling summary

    Returns:
        Gate schedule; ``notes`` carry the retained coupling and its projection
    """
    summary = (
        recoupling
        if isinstance(recoupling, RecouplingSummary)
        else summarize_recoupling(recoupling, model, plane_a, plane_b)
    )
    if {summary.plane_a, summary.plane_b} != {plane_a, plane_b}:
        raise GateError(
            f"Recoupling summary is for planes {summary.plane_a},{summary.plane_b}", planes=(plane_a, plane_b)
        )
    axis_a, axis_b = (
        (summary.axis_a, summary.axis_b) if summary.plane_a == plane_a else (summary.axis_b, summary.axis_a)
    )
    schedule = cnot_from_coupling(plane_a, plane_b, summary.d_ab_hz, axis_a, axis_b)
    schedule.notes["projection"] = summary.projection
    logger.info(
        "CNOT %d->%d from retained %s = %.4g Hz, gate time %.4g s",
        plane_a, plane_b, summary.label, summary.d_ab_hz, schedule.gate_time,
    )
    return schedule


def makhlin_invariants(u: np.ndarray | Operator) -> tuple[complex, float]:
    """
    Local-equivalence invariants ``(G1, G2)`` of a two-qubit unitary.

    Two gates differing only by single-qubit operations share both invariants; CNOT and
    CZ give ``(0, 1)``.
    """
    matrix = u.matrix if isinstance(u, Operator) else np.asarray(u, dtype=complex)
    if matrix.shape != (4, 4):
        raise GateError(f"Makhlin invariants need a 4x4 unitary, got {matrix.shape}")
    in_magic = MAGIC_BASIS.conj().T @ matrix @ MAGIC_BASIS
    m = in_magic.T @ in_magic
    det = np.linalg.det(matrix)
    tr = np.trace(m)
    g1 = tr**2 / (16.0 * det)
    g2 = (tr**2 - np.trace(m @ m)) / (4.0 * det)
    return complex(g1), float(g2.real)


def locally_equivalent(u: np.ndarray | Operator, v: np.ndarray | Operator, tol: float = 1e-9) -> bool:
    g1_u, g2_u = makhlin_invariants(u)
    g1_v, g2_v = makhlin_invariants(v)
    return abs(g1_u - g1_v) < tol and abs(g2_u - g2_v) < tol
