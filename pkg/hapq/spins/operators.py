"""
Spin-1/2 many-body operators on dense 2^n matrices.

Kronecker order puts site 0 leftmost; ``|up>`` is ``(1, 0)`` with ``Iz = +1/2``.
"""

import csv
import functools
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hapq.core.exceptions import DimensionError, SpinCapError, ValidationError

logger = logging.getLogger(__name__)

SPIN_CAP = 14

SINGLE_SPIN = {
    "x": np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex),
    "y": np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex),
    "z": np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex),
    "+": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
    "-": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class Operator:
    """A dense operator on ``n`` spins with a human-readable label."""

    matrix: np.ndarray
    label: str = ""

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_spins(self) -> int:
        return self.dim.bit_length() - 1

    def hermitian_error(self) -> float:
        """``||H - H†||_max`` relative to ``||H||_max`` (0 for the zero operator)."""
        scale = float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0
        if scale == 0.0:
            return 0.0
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T))) / scale

    def __add__(self, other: "Operator") -> "Operator":
        _check_same_dim(self.matrix, other.matrix)
        return Operator(self.matrix + other.matrix, f"{self.label} + {other.label}")

    def __sub__(self, other: "Operator") -> "Operator":
        _check_same_dim(self.matrix, other.matrix)
        return Operator(self.matrix - other.matrix, f"{self.label} - {other.label}")

    def __matmul__(self, other: "Operator") -> "Operator":
        _check_same_dim(self.matrix, other.matrix)
        return Operator(self.matrix @ other.matrix, f"{self.label}*{other.label}")

    def scaled(self, factor: complex, label: str | None = None) -> "Operator":
        return Operator(self.matrix * factor, label if label is not None else f"{factor}*{self.label}")


def _check_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"Operator dimension mismatch: {a.shape} vs {b.shape}", operation="operator algebra")


def check_spin_count(n: int) -> None:
    """Validate a cluster size against the dense-matrix cap."""
    if n < 1:
        raise ValidationError(f"Spin count must be at least 1, got {n}", field="n")
    if n > SPIN_CAP:
        raise SpinCapError(f"{n} spins exceed the dense-matrix cap of {SPIN_CAP}", n_spins=n)


@functools.lru_cache(maxsize=256)
def _embedded(axis: str, site_index: int, n: int) -> np.ndarray:
    left = np.eye(2**site_index, dtype=complex)
    right = np.eye(2 ** (n - site_index - 1), dtype=complex)
    matrix = np.kron(np.kron(left, SINGLE_SPIN[axis]), right)
    matrix.setflags(write=False)
    return matrix


def spin_operator(axis: str, site_index: int, n: int) -> Operator:
    """
    Single-spin angular momentum component embedded in an n-spin space.

    Args:
        axis: One of ``x``, ``y``, ``z``, ``+``, ``-``
        site_index: Spin index, 0-based
        n: Number of spins

    Returns:
        Operator of dimension 2^n
    """
    check_spin_count(n)
    if axis not in SINGLE_SPIN:
        raise ValidationError(f"Unknown spin axis {axis!r}", field="axis")
    if not 0 <= site_index < n:
        raise ValidationError(f"Site index {site_index} out of range for {n} spins", field="site_index")
    return Operator(_embedded(axis, site_index, n), f"I{site_index}{axis}")


def total_spin(axis: str, n: int, sites: list[int] | None = None) -> Operator:
    """Sum of ``I_axis`` over ``sites`` (all spins by default)."""
    indices = range(n) if sites is None else sites
    matrix = np.zeros((2**n, 2**n), dtype=complex)
    for i in indices:
        matrix = matrix + spin_operator(axis, i, n).matrix
    return Operator(matrix, f"I{axis}")


def commutator(a: Operator, b: Operator) -> Operator:
    _check_same_dim(a.matrix, b.matrix)
    return Operator(a.matrix @ b.matrix - b.matrix @ a.matrix, f"[{a.label}, {b.label}]")


def reduced_operator(matrix: np.ndarray, sites: tuple[int, ...], n: int) -> np.ndarray:
    """
    Partial trace of ``matrix`` over every spin not in ``sites``.

    The kept spins stay in ascending order in the Kronecker product.
    """
    keep = sorted(sites)
    tensor = matrix.reshape([2] * (2 * n))
    rows = list(range(n))
    cols = list(range(n, 2 * n))
    for k in range(n):
        if k not in keep:
            cols[k] = rows[k]
    out = [rows[k] for k in keep] + [cols[k] for k in keep]
    reduced = np.einsum(tensor, rows + cols, out)
    size = 2 ** len(keep)
    return reduced.reshape(size, size)


def pair_terms(h: Operator) -> dict[tuple[int, int], float]:
    """
    Two-spin content of an operator, per pair.

    Returns:
        Map ``(i, j) -> sqrt(sum_ab c_ab^2)`` where ``c_ab`` are the coefficients of
        ``I_ia I_jb`` (``a, b`` in x, y, z) in ``h``, in the units of ``h``
    """
    n = h.n_spins
    result = {}
    for i in range(n):
        for j in range(i + 1, n):
            reduced = reduced_operator(h.matrix, (i, j), n)
            coefficients = [
                np.trace(np.kron(SINGLE_SPIN[a], SINGLE_SPIN[b]) @ reduced).real / (2**n / 16)
                for a in "xyz"
                for b in "xyz"
            ]
            result[(i, j)] = float(np.sqrt(np.sum(np.square(coefficients))))
    return result


def operator_to_csv(op: Operator | np.ndarray, path: str | Path) -> None:
    """Write an operator as CSV with columns row, col, re, im (nonzero entries only)."""
    matrix = op.matrix if isinstance(op, Operator) else np.asarray(op)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["row", "col", "re", "im"])
        rows, cols = np.nonzero(matrix)
        for r, c in zip(rows.tolist(), cols.tolist()):
            value = matrix[r, c]
            writer.writerow([r, c, repr(float(value.real)), repr(float(value.imag))])
