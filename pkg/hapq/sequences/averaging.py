"""
Zeroth-order average Hamiltonians and exact stroboscopic propagators.

The toggling frame is the rf-only propagator ``U_rf(t)``. Within a constant-rf segment
``H_rf = V diag(lam) V†``, so the toggling-frame interaction is
``U0† V (W o exp(i (lam_m - lam_n) t)) V† U0`` with ``W = V† H V`` and ``U0`` the rf
propagator at the segment start; the time integral reduces to a matrix of scalar
oscillatory integrals, evaluated by composite Gauss-Legendre quadrature with node doubling.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss

from hapq.core.exceptions import ContractViolationError, QuadratureError, SequenceError
from hapq.sequences.library import lee_goldburg
from hapq.sequences.pulses import PulseSequence, check_targets, rf_hamiltonian, rotation_unitary
from hapq.spins.evolution import HERMITIAN_TOL, fidelity, propagator
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import SINGLE_SPIN, Operator, pair_terms, reduced_operator
from hapq.structure.couplings import CouplingTable
from hapq.structure.lattice import SpinSite
from hapq.utils.exception_handler import handle_sequence_exceptions

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
AXIS_NAMES = ("x'", "y'", "z'")
# Largest phase of the fastest oscillation within one quadrature sub-interval
SUBINTERVAL_PHASE = 4.0 * math.pi


@dataclass(frozen=True)
class ProductTerm:
    """A product-operator term ``coefficient_hz * 2*pi * prod(u_k . I_k)``."""

    label: str
    spins: tuple[int, ...]
    axes: tuple[tuple[float, float, float], ...]
    coefficient_hz: float


@dataclass
class EffectiveHamiltonianReport:
    """Zeroth-order average Hamiltonian of one sequence cycle."""

    h_bar: Operator
    decomposition: list[ProductTerm]
    residual_norm: float
    suppression_ratios: dict[str, tuple[float, float]]
    effective_fields: dict[int, float]
    frames: list[np.ndarray]
    cycle_time: float
    sequence: str = ""
    quadrature_nodes: int = 0
    identity_hz: float = 0.0
    notes: dict[str, float] = field(default_factory=dict)

    def max_two_spin_hz(self) -> float:
        return max((abs(t.coefficient_hz) for t in self.decomposition if len(t.spins) == 2), default=0.0)


def field_frame(field_hz: np.ndarray) -> np.ndarray:
    """
    Right-handed frame with z' along the field; rows are x', y', z' in lab coordinates.

    x' is ``y x z'`` (the in-plane perpendicular for fields in the xz plane), falling back
    to lab x for fields along y. A zero field gives the lab frame.
    """
    norm = float(np.linalg.norm(field_hz))
    if norm == 0.0:
        return np.eye(3)
    z_axis = np.asarray(field_hz, dtype=float) / norm
    x_axis = np.cross(np.array([0.0, 1.0, 0.0]), z_axis)
    if np.linalg.norm(x_axis) < 1e-9:
        x_axis = np.array([1.0, 0.0, 0.0])
    x_axis /= np.linalg.norm(x_axis)
    y_axis = np.cross(z_axis, x_axis)
    return np.vstack([x_axis, y_axis, z_axis])


def effective_frames(seq: PulseSequence, model: SpinSystemModel) -> tuple[list[np.ndarray], dict[int, float]]:
    """
    Per-spin effective-field frame and magnitude.

    A spin on a plane listed in ``seq.frames`` gets that frame and field. A spin whose
    nonzero fields over the cycle all lie along one axis (up to sign) gets the frame of
    that axis and the magnitude of its first field; otherwise the lab frame and no entry
    in the magnitude map.
    """
    frames, magnitudes = [], {}
    for k, site in enumerate(model.sites):
        hint = seq.frames.get(site.plane_index)
        if hint is not None:
            frames.append(field_frame(np.asarray(hint.axis, dtype=float)))
            magnitudes[k] = hint.field_hz
            continue
        fields = [s.field_for_plane(site.plane_index) for s in seq.segments if s.rotation is None]
        fields = [f for f in fields if np.linalg.norm(f) > 0.0]
        if not fields:
            frames.append(np.eye(3))
            continue
        first = fields[0] / np.linalg.norm(fields[0])
        collinear = all(abs(abs(np.dot(first, f / np.linalg.norm(f))) - 1.0) < 1e-12 for f in fields)
        if collinear:
            frames.append(field_frame(fields[0]))
            magnitudes[k] = float(np.linalg.norm(fields[0]))
        else:
            frames.append(np.eye(3))
    return frames, magnitudes


def _local(axis: np.ndarray) -> np.ndarray:
    return axis[0] * SINGLE_SPIN["x"] + axis[1] * SINGLE_SPIN["y"] + axis[2] * SINGLE_SPIN["z"]


def _embed(locals_by_spin: dict[int, np.ndarray], n: int) -> np.ndarray:
    matrix = np.array([[1.0]], dtype=complex)
    for k in range(n):
        matrix = np.kron(matrix, locals_by_spin.get(k, np.eye(2)))
    return matrix


def decompose(
    h_bar: np.ndarray, frames: list[np.ndarray], zero_tol_hz: float = 0.0
) -> tuple[list[ProductTerm], float, float]:
    """
    Project an operator onto one- and two-spin products in per-spin frames.

    Args:
        h_bar: Hermitian matrix in rad/s
        frames: Frame of every spin (rows x', y', z')
        zero_tol_hz: Terms with ``|c| <= zero_tol_hz`` are left out of the list

    Returns:
        ``(terms, residual_hz, identity_hz)``; the residual is the max-abs entry of
        everything the listed terms and the identity part do not reconstruct, over 2*pi
    """
    n = len(frames)
    dim = 2**n
    identity_coefficient = float(np.trace(h_bar).real) / dim
    reconstruction = identity_coefficient * np.eye(dim, dtype=complex)
    terms: list[ProductTerm] = []

    for i in range(n):
        reduced = reduced_operator(h_bar, (i,), n)
        for a in range(3):
            op = _local(frames[i][a])
            c = float(np.trace(op @ reduced).real) / (2 ** (n - 1) * 0.5)
            if abs(c) / TWO_PI > zero_tol_hz:
                terms.append(ProductTerm(f"I{i}{AXIS_NAMES[a][0]}'", (i,), (tuple(frames[i][a]),), c / TWO_PI))
                reconstruction += c * _embed({i: op}, n)

    for i in range(n):
        for j in range(i + 1, n):
            reduced = reduced_operator(h_bar, (i, j), n)
            for a in range(3):
                op_a = _local(frames[i][a])
                for b in range(3):
                    op_b = _local(frames[j][b])
                    c = float(np.trace(np.kron(op_a, op_b) @ reduced).real) / (2 ** (n - 2) * 0.25)
                    if abs(c) / TWO_PI > zero_tol_hz:
                        label = f"I{i}{AXIS_NAMES[a][0]}'I{j}{AXIS_NAMES[b][0]}'"
                        terms.append(
                            ProductTerm(label, (i, j), (tuple(frames[i][a]), tuple(frames[j][b])), c / TWO_PI)
                        )
                        reconstruction += c * _embed({i: op_a, j: op_b}, n)

    residual = float(np.max(np.abs(h_bar - reconstruction))) / TWO_PI
    return terms, residual, identity_coefficient / TWO_PI


def _subinterval_sum(omega: np.ndarray, width: float, count: int) -> np.ndarray:
    """``sum_{s<count} exp(i omega s width)`` in closed form."""
    if count == 1:
        return np.ones_like(omega, dtype=complex)
    half = 0.5 * omega * width
    denominator = np.sin(half)
    degenerate = np.abs(denominator) < 1e-12
    kernel = np.sin(count * half) / np.where(degenerate, 1.0, denominator)
    dirichlet = np.exp(1j * half * (count - 1)) * kernel
    return np.where(degenerate, complex(count), dirichlet)


def _segment_integral(
    w: np.ndarray, omega: np.ndarray, duration: float, scale: float, tolerance: float, initial_nodes: int, max_nodes: int
) -> tuple[np.ndarray, int]:
    """
    ``W o int_0^T exp(i omega t) dt`` by composite Gauss-Legendre with doubling.

    The segment is cut into equal sub-intervals spanning at most ``SUBINTERVAL_PHASE``
    radians of the fastest oscillation each; the same nodes serve every sub-interval and
    the sub-interval phases are summed in closed form.
    """
    fastest = float(np.max(np.abs(omega))) if omega.size else 0.0
    count = max(1, math.ceil(fastest * duration / SUBINTERVAL_PHASE))
    width = duration / count
    shifts = _subinterval_sum(omega, width, count)

    def weights(n_nodes: int) -> np.ndarray:
        x, wts = leggauss(n_nodes)
        t = 0.5 * width * (x + 1.0)
        total = np.zeros_like(omega, dtype=complex)
        for t_k, w_k in zip(t, wts):
            total += w_k * np.exp(1j * omega * t_k)
        return 0.5 * width * total * shifts

    n_nodes = initial_nodes
    previous = w * weights(n_nodes)
    change = math.inf
    while n_nodes < max_nodes:
        n_nodes *= 2
        current = w * weights(n_nodes)
        change = float(np.max(np.abs(current - previous))) / duration
        logger.debug(f"Quadrature with {n_nodes} nodes: change {change:.3g} rad/s")
        if change <= tolerance * scale:
            return current, n_nodes
        previous = current
    raise QuadratureError(
        f"Average Hamiltonian quadrature did not converge with {max_nodes} nodes "
        f"(achieved relative change {change / scale:.3g}, requested {tolerance:.3g})",
        achieved_tolerance=change / scale,
    )


@handle_sequence_exceptions
def average_hamiltonian(
    seq: PulseSequence,
    h_int: Operator,
    model: SpinSystemModel,
    tolerance: float = 1e-6,
    initial_nodes: int = 16,
    max_nodes: int = 4096,
) -> EffectiveHamiltonianReport:
    """
    Zeroth-order average of ``h_int`` in the toggling frame of one cycle of ``seq``.

    Args:
        seq: Pulse sequence (one cycle is averaged; ``n_repeats`` is ignored)
        h_int: Hermitian internal Hamiltonian in rad/s
        model: Spin system the sequence acts on
        tolerance: Quadrature tolerance relative to ``||h_int||_max``
        initial_nodes: Gauss-Legendre nodes of the first estimate
        max_nodes: Node cap before giving up

    Returns:
        Report with the averaged operator and its product-operator decomposition

    Raises:
        SequenceError: If the cycle time is zero
        ContractViolationError: If ``h_int`` is not Hermitian
        QuadratureError: If a segment integral does not converge
    """
    if seq.cycle_time <= 0.0:
        raise SequenceError("Average Hamiltonian needs a positive cycle time", sequence=seq.name)
    if h_int.hermitian_error() > HERMITIAN_TOL:
        raise ContractViolationError("average_hamiltonian needs a Hermitian internal Hamiltonian")
    if h_int.dim != 2**model.n:
        raise SequenceError(f"Internal Hamiltonian dimension {h_int.dim} does not match {model.n} spins")
    check_targets(seq, model)

    h = h_int.matrix
    dim = h.shape[0]
    scale = float(np.max(np.abs(h))) if h.size else 0.0
    u_before = np.eye(dim, dtype=complex)
    integral = np.zeros((dim, dim), dtype=complex)
    nodes_used = 0

    for index, segment in enumerate(seq.segments):
        if segment.rotation is not None:
            u_before = rotation_unitary(segment.rotation, model).matrix @ u_before
            continue
        h_rf = rf_hamiltonian(seq, index, model).matrix
        if not np.any(h_rf):
            integral += segment.duration * (u_before.conj().T @ h @ u_before)
            continue
        energies, vectors = scipy.linalg.eigh(h_rf)
        if scale > 0.0:
            w = vectors.conj().T @ h @ vectors
            omega = energies[:, None] - energies[None, :]
            averaged, n_nodes = _segment_integral(
                w, omega, segment.duration, scale, tolerance, initial_nodes, max_nodes
            )
            nodes_used = max(nodes_used, n_nodes)
            block = vectors @ averaged @ vectors.conj().T
            integral += u_before.conj().T @ block @ u_before
        u_before = (vectors * np.exp(-1j * energies * segment.duration)) @ vectors.conj().T @ u_before

    h_bar = integral / seq.cycle_time
    h_bar = 0.5 * (h_bar + h_bar.conj().T)

    frames, magnitudes = effective_frames(seq, model)
    zero_tol = 1e-12 * scale / TWO_PI
    terms, residual, identity_hz = decompose(h_bar, frames, zero_tol)

    before = pair_terms(h_int)
    after = pair_terms(Operator(h_bar))
    suppression = {
        f"I{i}-I{j}": (before[(i, j)] / TWO_PI, after[(i, j)] / TWO_PI)
        for (i, j) in before
        if before[(i, j)] > 0.0 or after[(i, j)] > 0.0
    }
    logger.debug(f"Averaged {seq.name or 'sequence'} over {seq.cycle_time:.6g} s: {len(terms)} terms")
    return EffectiveHamiltonianReport(
        h_bar=Operator(h_bar, "H_bar"),
        decomposition=terms,
        residual_norm=residual,
        suppression_ratios=suppression,
        effective_fields=magnitudes,
        frames=frames,
        cycle_time=seq.cycle_time,
        sequence=seq.name,
        quadrature_nodes=nodes_used,
        identity_hz=identity_hz,
    )


def cycle_propagator(seq: PulseSequence, model: SpinSystemModel, h_int: Operator) -> Operator:
    """Exact propagator of one cycle of ``h_int + H_rf``."""
    check_targets(seq, model)
    u = np.eye(h_int.dim, dtype=complex)
    for index, segment in enumerate(seq.segments):
        if segment.rotation is not None:
            step = rotation_unitary(segment.rotation, model).matrix
        else:
            total = Operator(h_int.matrix + rf_hamiltonian(seq, index, model).matrix, "H")
            step = propagator(total, segment.duration).matrix
        u = step @ u
    return Operator(u, f"U_cycle[{seq.name}]")


def stroboscopic_propagator(
    seq: PulseSequence, model: SpinSystemModel, h_int: Operator, n_repeats: int | None = None
) -> Operator:
    """
    Exact time-ordered propagator of the sequence, ``U_cycle ** n_repeats``.

    Args:
        seq: Pulse sequence
        model: Spin system
        h_int: Internal Hamiltonian in rad/s
        n_repeats: Override of ``seq.n_repeats``; 0 gives the identity

    Returns:
        Unitary operator
    """
    repeats = seq.n_repeats if n_repeats is None else n_repeats
    if repeats < 0:
        raise SequenceError(f"n_repeats must be nonnegative, got {repeats}", sequence=seq.name)
    if repeats == 0:
        return Operator(np.eye(h_int.dim, dtype=complex), "1")
    cycle = cycle_propagator(seq, model, h_int)
    return Operator(np.linalg.matrix_power(cycle.matrix, repeats), f"U[{seq.name}]^{repeats}")


def sequence_evolution(seq: PulseSequence, model: SpinSystemModel, h_int: Operator) -> Callable[[float], Operator]:
    """
    Exact evolution under repeated cycles of ``seq`` for a requested time.

    The returned callable runs ``max(1, round(t / cycle_time))`` whole cycles, so the
    realized time is the request rounded to the cycle grid.
    """
    if seq.cycle_time <= 0.0:
        raise SequenceError("Stroboscopic evolution needs a positive cycle time", sequence=seq.name)
    cycle = cycle_propagator(seq, model, h_int).matrix

    def evolve_for(duration: float) -> Operator:
        repeats = max(1, round(duration / seq.cycle_time))
        logger.debug(f"Evolving {duration:.6g} s as {repeats} cycles of {seq.cycle_time:.6g} s")
        return Operator(np.linalg.matrix_power(cycle, repeats), f"U[{seq.name}]^{repeats}")

    return evolve_for


def effective_propagator(report: EffectiveHamiltonianReport, n_cycles: int) -> Operator:
    """``exp(-i H_bar t_c n)``."""
    return propagator(report.h_bar, report.cycle_time * n_cycles)


@dataclass(frozen=True)
class RecouplingSummary:
    """The retained A-B product term and the off-target diagnostics of a recoupling report."""

    plane_a: int
    plane_b: int
    spins: tuple[int, int]
    d_ab_hz: float
    bare_hz: float
    axis_a: tuple[float, float, float]
    axis_b: tuple[float, float, float]
    label: str
    projection: float
    off_target_hz: float
    suppression_ratio: float
    omega_a_hz: float
    omega_b_hz: float

    @property
    def scaling(self) -> float:
        """Magnitude of the retained over the bare coupling."""
        return abs(self.d_ab_hz / self.bare_hz) if self.bare_hz else math.nan

    @property
    def sign(self) -> int:
        """Sign of the retained coefficient relative to the bare coupling (0 if either vanishes)."""
        product = self.d_ab_hz * self.bare_hz
        return 0 if product == 0.0 else (1 if product > 0 else -1)


def summarize_recoupling(
    report: EffectiveHamiltonianReport, model: SpinSystemModel, plane_a: int, plane_b: int
) -> RecouplingSummary:
    """
    Find the retained A-B interaction of a double-irradiation report.

    The dominant A-B product type (pair of frame axes) is the one with the largest total
    weight over all A-B spin pairs; ``projection`` is its share of the squared A-B
    two-spin coefficients. ``off_target_hz`` is the largest two-spin coefficient between
    A or B and any other plane.
    """
    spins_a = set(model.spins_in_plane(plane_a))
    spins_b = set(model.spins_in_plane(plane_b))
    if not spins_a or not spins_b:
        raise SequenceError(f"Planes {plane_a} and {plane_b} must both be present in the model")

    ab_terms, off_target = [], 0.0
    for term in report.decomposition:
        if len(term.spins) != 2:
            continue
        i, j = term.spins
        if (i in spins_a and j in spins_b) or (i in spins_b and j in spins_a):
            ab_terms.append(term)
        elif (i in spins_a | spins_b) != (j in spins_a | spins_b):
            off_target = max(off_target, abs(term.coefficient_hz))
    if not ab_terms:
        raise SequenceError(f"No retained coupling between planes {plane_a} and {plane_b}")

    def product_type(term: ProductTerm) -> tuple[str, str]:
        # Label axes ordered as (A spin, B spin)
        first, second = term.label.split("'")[0][-1], term.label.split("'")[1][-1]
        return (first, second) if term.spins[0] in spins_a else (second, first)

    weights: dict[tuple[str, str], float] = {}
    for term in ab_terms:
        weights[product_type(term)] = weights.get(product_type(term), 0.0) + term.coefficient_hz**2
    total = sum(weights.values())
    dominant_type = max(weights, key=lambda k: weights[k])
    candidates = [t for t in ab_terms if product_type(t) == dominant_type]
    retained = max(candidates, key=lambda t: abs(t.coefficient_hz))

    i, j = retained.spins
    spin_a, spin_b = (i, j) if i in spins_a else (j, i)
    axis_a, axis_b = retained.axes if i in spins_a else retained.axes[::-1]
    entry = model.couplings.lookup(model.sites[i].id, model.sites[j].id)
    ratio = abs(retained.coefficient_hz) / off_target if off_target > 0.0 else math.inf
    return RecouplingSummary(
        plane_a=plane_a,
        plane_b=plane_b,
        spins=(spin_a, spin_b),
        d_ab_hz=retained.coefficient_hz,
        bare_hz=entry.d_hz if entry is not None else 0.0,
        axis_a=axis_a,
        axis_b=axis_b,
        label=retained.label,
        projection=weights[dominant_type] / total if total > 0 else 0.0,
        off_target_hz=off_target,
        suppression_ratio=ratio,
        omega_a_hz=report.effective_fields.get(spin_a, 0.0),
        omega_b_hz=report.effective_fields.get(spin_b, 0.0),
    )


def single_spin_model(plane: int = 0, chain_spacing: float = 3.44e-10) -> SpinSystemModel:
    """One spin on ``plane`` with no couplings."""
    site = SpinSite(id=0, chain_id=0, plane_index=plane, position=(0.0, 0.0, plane * chain_spacing))
    return SpinSystemModel(sites=(site,), couplings=CouplingTable((), 0.0), chain_spacing=chain_spacing)


def offset_scaling(seq: PulseSequence, offset_hz: float, tolerance: float = 1e-6) -> tuple[float, np.ndarray]:
    """
    Scaling of a resonance offset by the sequence.

    Args:
        seq: Pulse sequence
        offset_hz: Offset of a single spin
        tolerance: Quadrature tolerance

    Returns:
        ``(factor, axis)``: the averaged offset field is ``factor*offset_hz`` along the lab unit ``axis``
    """
    if offset_hz == 0.0:
        raise SequenceError("offset_scaling needs a nonzero offset", sequence=seq.name)
    plane = min(seq.planes_referenced(), default=0)
    model = single_spin_model(plane)
    h = Operator(TWO_PI * offset_hz * SINGLE_SPIN["z"], "H_offset")
    report = average_hamiltonian(seq, h, model, tolerance=tolerance)
    vector = np.array(
        [np.trace(SINGLE_SPIN[a] @ report.h_bar.matrix).real / 0.5 for a in "xyz"]
    ) / TWO_PI
    magnitude = float(np.linalg.norm(vector))
    axis = vector / magnitude if magnitude > 0 else np.zeros(3)
    return magnitude / abs(offset_hz), axis


@dataclass(frozen=True)
class ConvergencePoint:
    ratio: float
    amplitude_hz: float
    fidelity: float


def aht_convergence(
    model: SpinSystemModel,
    h_int: Operator,
    ratios: list[float],
    n_cycles: int = 10,
    tolerance: float = 1e-6,
) -> list[ConvergencePoint]:
    """
    Fidelity between the exact and the zeroth-order LG propagators vs rf amplitude.

    The amplitude at each ratio is ``ratio * max|d|`` of the model's couplings.
    """
    max_coupling = model.couplings.max_abs_hz()
    if max_coupling == 0.0:
        raise SequenceError("aht_convergence needs a model with nonzero couplings", sequence="lg")
    points = []
    for ratio in ratios:
        amplitude = ratio * max_coupling
        seq = lee_goldburg(amplitude, n_cycles)
        report = average_hamiltonian(seq, h_int, model, tolerance=tolerance)
        exact = stroboscopic_propagator(seq, model, h_int)
        value = fidelity(exact, effective_propagator(report, n_cycles))
        logger.debug(f"LG ratio {ratio:g} ({amplitude:.6g} Hz): fidelity {value:.9f}")
        points.append(ConvergencePoint(ratio, amplitude, value))
    return points
