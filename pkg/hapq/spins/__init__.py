"""
Spin-1/2 cluster simulation: operators, Hamiltonians and exact propagation.
"""

from hapq.spins.evolution import (
    basis_state,
    evolve,
    expectation,
    fidelity,
    maximally_mixed,
    polarized_state,
    propagator,
    trotter_propagator,
    unitarity_error,
)
from hapq.spins.hamiltonians import dipolar_hamiltonian, internal_hamiltonian, zeeman_hamiltonian
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import (
    SPIN_CAP,
    Operator,
    commutator,
    operator_to_csv,
    pair_terms,
    spin_operator,
    total_spin,
)

__all__ = [
    "SPIN_CAP",
    "Operator",
    "SpinSystemModel",
    "spin_operator",
    "total_spin",
    "commutator",
    "pair_terms",
    "operator_to_csv",
    "zeeman_hamiltonian",
    "dipolar_hamiltonian",
    "internal_hamiltonian",
    "propagator",
    "trotter_propagator",
    "unitarity_error",
    "fidelity",
    "expectation",
    "basis_state",
    "polarized_state",
    "maximally_mixed",
    "evolve",
]
