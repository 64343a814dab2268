"""
Shared fixtures for the hapq test suite.
"""

from pathlib import Path

import pytest

from hapq.spins.hamiltonians import internal_hamiltonian
from hapq.spins.model import SpinSystemModel
from hapq.structure.constants import ANGSTROM
from hapq.structure.lattice import LatticeSpec

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def chain_model(n_planes: int, gradient: float = 0.0) -> SpinSystemModel:
    """Single chain with one spin per plane."""
    return SpinSystemModel.from_lattice(LatticeSpec(n_planes=n_planes), gradient=gradient)


@pytest.fixture
def two_chain_spec() -> LatticeSpec:
    """Three planes of two chains one in-plane neighbour distance apart."""
    return LatticeSpec(n_planes=3, chain_pattern="explicit", chain_offsets=((0.0, 0.0), (9.42 * ANGSTROM, 0.0)))


@pytest.fixture
def six_spin_model(two_chain_spec: LatticeSpec) -> SpinSystemModel:
    return SpinSystemModel.from_lattice(two_chain_spec)


@pytest.fixture
def six_spin_hamiltonian(six_spin_model: SpinSystemModel):
    return internal_hamiltonian(six_spin_model, "full_secular", zeeman=False)


@pytest.fixture
def six_spin_device_hamiltonian(six_spin_model: SpinSystemModel):
    """Each plane in its own resonance frame: flip-flops only within a plane."""
    return internal_hamiltonian(six_spin_model, "interplane_zz", zeeman=False)


@pytest.fixture
def nominal_config_path() -> Path:
    return CONFIG_DIR / "nominal_device.conf"


@pytest.fixture
def unboosted_config_path() -> Path:
    return CONFIG_DIR / "unboosted_gradient.conf"


@pytest.fixture
def write_config(tmp_path: Path):
    """Write config text to a file and return its path."""

    def _write(text: str, name: str = "test.conf") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write
