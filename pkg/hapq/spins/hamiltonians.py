"""
Rotating-frame Hamiltonians of a spin cluster, in rad/s.
"""

import math
from typing import Literal

import numpy as np

from hapq.core.exceptions import ValidationError
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import Operator, spin_operator

DipolarForm = Literal["full_secular", "zz_truncated", "interplane_zz"]
DIPOLAR_FORMS = ("full_secular", "zz_truncated", "interplane_zz")


def zeeman_hamiltonian(model: SpinSystemModel) -> Operator:
    """
    Gradient offsets in the frame rotating at the carrier plane's Larmor frequency.

    ``H_Z = sum_i 2*pi*df_i*I_zi`` with ``df_i = (gamma/2pi)*G*(z_i - z_carrier)``.
    """
    n = model.n
    diagonal = np.zeros(2**n)
    for i, offset in enumerate(model.offsets_hz()):
        if offset != 0.0:
            diagonal += 2.0 * math.pi * offset * np.diag(spin_operator("z", i, n).matrix).real
    return Operator(np.diag(diagonal).astype(complex), "H_Z")


def pair_hamiltonian(i: int, j: int, d_hz: float, n: int, form: DipolarForm = "full_secular") -> np.ndarray:
    """Secular dipolar Hamiltonian of one pair in rad/s."""
    zz = spin_operator("z", i, n).matrix @ spin_operator("z", j, n).matrix
    if form == "zz_truncated":
        return 2.0 * math.pi * d_hz * 2.0 * zz
    xx = spin_operator("x", i, n).matrix @ spin_operator("x", j, n).matrix
    yy = spin_operator("y", i, n).matrix @ spin_operator("y", j, n).matrix
    return 2.0 * math.pi * d_hz * (2.0 * zz - xx - yy)


def dipolar_hamiltonian(model: SpinSystemModel, form: DipolarForm = "full_secular") -> Operator:
    """
    Secular dipolar Hamiltonian of the model's coupling table.

    ``interplane_zz`` keeps the full secular form within a plane and truncates pairs on
    different planes to ``2IzIz``: with every plane in its own resonance frame, the
    gradient offset between two planes removes their flip-flop terms.

    Args:
        model: Spin system
        form: ``full_secular`` for ``2*pi*d*(3IzIz - I.I)``, ``zz_truncated`` for
            ``2*pi*d*2IzIz``, ``interplane_zz`` for the mixed form

    Returns:
        Hermitian operator in rad/s

    Raises:
        ValidationError: If ``form`` is not a known tag
    """
    if form not in DIPOLAR_FORMS:
        raise ValidationError(f"Unknown dipolar form {form!r} (expected one of {', '.join(DIPOLAR_FORMS)})", field="form")
    n = model.n
    matrix = np.zeros((2**n, 2**n), dtype=complex)
    for i, j, d_hz in model.indexed_couplings():
        pair_form = form
        if form == "interplane_zz":
            same_plane = model.sites[i].plane_index == model.sites[j].plane_index
            pair_form = "full_secular" if same_plane else "zz_truncated"
        matrix += pair_hamiltonian(i, j, d_hz, n, pair_form)
    return Operator(matrix, f"H_D[{form}]")


def internal_hamiltonian(model: SpinSystemModel, form: DipolarForm = "full_secular", zeeman: bool = True) -> Operator:
    """Dipolar Hamiltonian plus (optionally) the gradient offsets."""
    h = dipolar_hamiltonian(model, form)
    if zeeman and model.gradient > 0:
        h = h + zeeman_hamiltonian(model)
    return Operator(h.matrix, "H_int")
