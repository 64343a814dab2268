"""
Shared plumbing for CLI commands: cluster construction, output paths and exit codes.
"""

import logging
from collections.abc import Callable
from pathlib import Path

from rich.console import Console

from hapq.core.config import Config
from hapq.core.exceptions import (
    ConfigError,
    ConfigMissingError,
    HapqError,
    QuadratureError,
    SequenceError,
    SimulationError,
    SpinCapError,
)
from hapq.sequences.library import double_irradiation, lee_goldburg, mrev8
from hapq.sequences.pulses import PulseSequence
from hapq.sequences.textformat import load_sequence
from hapq.spins.hamiltonians import DipolarForm, internal_hamiltonian
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import Operator
from hapq.structure.lattice import LatticeSpec
from hapq.utils.exception_handler import log_exception
from hapq.utils.reporting import prepare_directory

logger = logging.getLogger(__name__)

console = Console()
error_console = Console(stderr=True)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

# Exact-vs-average fidelity below which a report carries a warning
CROSS_CHECK_WARN = 0.99


def lattice_spec(config: Config) -> LatticeSpec:
    return LatticeSpec(**config.lattice.model_dump())


def cluster_model(config: Config) -> SpinSystemModel:
    """The simulation cluster: configured planes and chains of the configured lattice."""
    sim = config.simulation
    return SpinSystemModel.from_lattice(
        lattice_spec(config),
        planes=sim.planes,
        chains=sim.chains,
        gradient=sim.gradient,
        carrier_plane=sim.carrier_plane,
        cutoff_hz=sim.cutoff,
    )


def resolve_dipolar_form(config: Config, seq: PulseSequence | None = None) -> DipolarForm:
    """
    The configured dipolar form; ``auto`` is ``interplane_zz`` for sequences addressing
    individual planes and ``full_secular`` for broadband ones.
    """
    form = config.simulation.dipolar_form
    if form != "auto":
        return form
    return "interplane_zz" if seq is not None and seq.planes_referenced() else "full_secular"


def cluster_hamiltonian(config: Config, model: SpinSystemModel, seq: PulseSequence | None = None) -> Operator:
    """Dipolar Hamiltonian of the cluster; each plane is in its own resonance frame."""
    return internal_hamiltonian(model, resolve_dipolar_form(config, seq), zeeman=False)


def output_directory(config: Config, out: str | None) -> Path:
    return prepare_directory(out or config.output.directory)


def wants(config: Config, fmt: str) -> bool:
    """Whether the configured output format includes ``fmt`` (csv or json)."""
    return config.output.format in (fmt, "both")


def exit_code_for(error: HapqError) -> int:
    if isinstance(error, QuadratureError):
        return EXIT_NUMERICAL
    if isinstance(error, SimulationError) and not isinstance(error, SpinCapError):
        return EXIT_NUMERICAL
    return EXIT_USAGE


def run_command(name: str, body: Callable[[], int]) -> int:
    """
    Run a command body, mapping hapq errors to exit codes and messages on stderr.

    Args:
        name: Command name for log context
        body: Command implementation returning its exit code

    Returns:
        Exit code
    """
    try:
        return body()
    except HapqError as e:
        log_exception(e, context=name, level=logging.DEBUG)
        error_console.print(f"[red]❌ {e}[/red]")
        if isinstance(e, ConfigMissingError) and e.missing_keys:
            error_console.print(f"[dim]Missing keys: {', '.join(e.missing_keys)}[/dim]")
        return exit_code_for(e)


SEQUENCE_NAMES = ("lg", "mrev8", "recouple", "file")


def build_sequence(config: Config, model: SpinSystemModel, name: str) -> PulseSequence:
    """
    The named sequence with the configured parameters, repeated ``n_cycles`` times.

    ``lg`` runs at ``amplitude_ratio`` times the largest coupling of the cluster; ``file``
    reads ``simulation.sequence_file``.
    """
    sim = config.simulation
    if name == "lg":
        largest = model.couplings.max_abs_hz()
        if largest == 0.0:
            raise SequenceError("LG amplitude is set relative to the largest coupling; the cluster has none", sequence=name)
        return lee_goldburg(sim.amplitude_ratio * largest, sim.n_cycles)
    if name == "mrev8":
        return mrev8(sim.mrev8_tau, sim.n_cycles, ideal_pulses=not sim.finite_pulses)
    if name == "recouple":
        # Shortest request: one commensurate window, then n_cycles windows
        single = double_irradiation(
            sim.plane_a,
            sim.plane_b,
            sim.recouple_amplitude,
            duration=1.0 / sim.recouple_amplitude,
            available_planes=model.planes(),
        )
        return single.with_repeats(sim.n_cycles)
    if name == "file":
        if not sim.sequence_file:
            raise ConfigError("simulation.sequence_file is required for the file sequence", config_key="simulation.sequence_file")
        return load_sequence(sim.sequence_file)
    raise SequenceError(f"Unknown sequence {name!r} (expected one of {', '.join(SEQUENCE_NAMES)})", sequence=name)
