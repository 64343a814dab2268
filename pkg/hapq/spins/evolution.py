"""
Exact propagation of spin clusters.

The primary exponential path is a Hermitian eigendecomposition; the Trotter product
formulas use ``scipy.linalg.expm`` per factor and serve as an independent oracle.
"""

import logging
from typing import Literal

import numpy as np
import scipy.linalg

from hapq.core.exceptions import ContractViolationError, DimensionError, ValidationError
from hapq.spins.operators import Operator, check_spin_count, spin_operator, total_spin
from hapq.utils.exception_handler import handle_simulation_exceptions

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12


def _require_hermitian(h: Operator, operation: str) -> None:
    error = h.hermitian_error()
    if error > HERMITIAN_TOL:
        raise ContractViolationError(
            f"{operation} needs a Hermitian operator (relative asymmetry {error:.3g})", operation=operation
        )


@handle_simulation_exceptions
def propagator(h: Operator, t: float) -> Operator:
    """
    Unitary ``U = exp(-i H t)`` via Hermitian eigendecomposition.

    Args:
        h: Hermitian Hamiltonian in rad/s
        t: Duration in seconds (may be negative)

    Returns:
        Unitary operator

    Raises:
        ContractViolationError: If ``h`` is not Hermitian
    """
    if not np.isfinite(t):
        raise ValidationError(f"Propagation time must be finite, got {t}", field="t")
    _require_hermitian(h, "propagator")
    if t == 0.0 or not np.any(h.matrix):
        return Operator(np.eye(h.dim, dtype=complex), "1")
    hermitian = 0.5 * (h.matrix + h.matrix.conj().T)
    energies, vectors = scipy.linalg.eigh(hermitian)
    phases = np.exp(-1j * energies * t)
    return Operator((vectors * phases) @ vectors.conj().T, f"exp(-i {h.label} t)")


def unitarity_error(u: Operator | np.ndarray) -> float:
    """``||U†U - 1||_max``."""
    matrix = u.matrix if isinstance(u, Operator) else u
    return float(np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0]))))


@handle_simulation_exceptions
def trotter_propagator(
    h_list: list[Operator], t: float, n_steps: int, symmetrized: bool = False, dim: int = 1
) -> Operator:
    """
    Product-formula approximation of ``exp(-i t sum H_k)``.

    Args:
        h_list: Hermitian terms
        t: Total duration
        n_steps: Number of Trotter steps
        symmetrized: Use the second-order (Strang) splitting
        dim: Dimension of the identity returned for an empty term list

    Returns:
        Approximate propagator; identity with a warning when ``h_list`` is empty
    """
    if n_steps < 1:
        raise ValidationError(f"n_steps must be at least 1, got {n_steps}", field="n_steps")
    if not h_list:
        logger.warning("trotter_propagator called with no Hamiltonian terms; returning identity")
        return Operator(np.eye(dim, dtype=complex), "1")
    dim = h_list[0].dim
    for h in h_list:
        if h.dim != dim:
            raise DimensionError(f"Trotter terms differ in dimension: {h.dim} vs {dim}", operation="trotter")
        _require_hermitian(h, "trotter_propagator")

    dt = t / n_steps
    if symmetrized:
        halves = [scipy.linalg.expm(-0.5j * h.matrix * dt) for h in h_list]
        step = np.eye(dim, dtype=complex)
        # e^{-iH_1 dt/2} ... e^{-iH_m dt/2} e^{-iH_m dt/2} ... e^{-iH_1 dt/2}, rightmost acts first
        for factor in halves:
            step = step @ factor
        for factor in reversed(halves):
            step = step @ factor
    else:
        step = np.eye(dim, dtype=complex)
        for h in h_list:
            step = scipy.linalg.expm(-1j * h.matrix * dt) @ step
    return Operator(np.linalg.matrix_power(step, n_steps), "U_trotter")


def fidelity(u: Operator, v: Operator) -> float:
    """Global-phase-invariant gate fidelity ``|Tr(U†V)| / 2^n``."""
    if u.dim != v.dim:
        raise DimensionError(f"Fidelity of operators with dimensions {u.dim} and {v.dim}", operation="fidelity")
    value = abs(np.trace(u.matrix.conj().T @ v.matrix)) / u.dim
    return float(min(1.0, value))


def expectation(state: np.ndarray, a: Operator) -> float:
    """
    Expectation value of a Hermitian observable.

    Args:
        state: State vector ``psi`` or density matrix ``rho``
        a: Observable

    Returns:
        ``<psi|A|psi>`` or ``Tr(rho A)``
    """
    state = np.asarray(state)
    if state.ndim == 1:
        if state.shape[0] != a.dim:
            raise DimensionError(f"State of dimension {state.shape[0]} vs operator {a.dim}", operation="expectation")
        value = np.vdot(state, a.matrix @ state)
    else:
        if state.shape != a.matrix.shape:
            raise DimensionError(f"Density matrix {state.shape} vs operator {a.matrix.shape}", operation="expectation")
        value = np.trace(state @ a.matrix)
    return float(value.real)


def basis_state(n: int, bits: str | list[int]) -> np.ndarray:
    """Computational basis state; bit 0 is ``|up>`` and site 0 is the leftmost bit."""
    check_spin_count(n)
    bit_list = [int(b) for b in bits]
    if len(bit_list) != n or any(b not in (0, 1) for b in bit_list):
        raise ValidationError(f"Expected {n} bits of 0/1, got {bits!r}", field="bits")
    vector = np.zeros(2**n, dtype=complex)
    vector[int("".join(str(b) for b in bit_list), 2)] = 1.0
    return vector


def polarized_state(n: int, axis: Literal["x", "y", "z"] = "z") -> np.ndarray:
    """Product state with every spin along ``+axis``."""
    single = {
        "z": np.array([1.0, 0.0], dtype=complex),
        "x": np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0),
        "y": np.array([1.0, 1.0j], dtype=complex) / np.sqrt(2.0),
    }[axis]
    check_spin_count(n)
    vector = np.array([1.0], dtype=complex)
    for _ in range(n):
        vector = np.kron(vector, single)
    return vector


def maximally_mixed(n: int) -> np.ndarray:
    check_spin_count(n)
    return np.eye(2**n, dtype=complex) / 2**n


def evolve(state: np.ndarray, u: Operator) -> np.ndarray:
    """Apply a propagator to a state vector (``U psi``) or density matrix (``U rho U†``)."""
    state = np.asarray(state)
    if state.shape[0] != u.dim:
        raise DimensionError(f"State of dimension {state.shape[0]} vs propagator {u.dim}", operation="evolve")
    if state.ndim == 1:
        return u.matrix @ state
    return u.matrix @ state @ u.matrix.conj().T


def transverse_magnetization(state: np.ndarray, n: int) -> float:
    """``|<sum I_x> + i <sum I_y>|`` normalized to the spin count."""
    mx = expectation(state, total_spin("x", n))
    my = expectation(state, total_spin("y", n))
    return float(np.hypot(mx, my) / (0.5 * n))


def z_polarization(state: np.ndarray, n: int, spins: list[int]) -> float:
    """Mean ``2<I_z>`` over ``spins``."""
    return float(np.mean([2.0 * expectation(state, spin_operator("z", i, n)) for i in spins]))
