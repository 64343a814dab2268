"""
Simulate command - exact stroboscopic evolution of a sequence with a Trotter cross-check.
"""

import logging

import numpy as np

from hapq.cli.commands.common import (
    EXIT_OK,
    build_sequence,
    cluster_hamiltonian,
    cluster_model,
    console,
    output_directory,
    run_command,
    wants,
)
from hapq.core.config import Config
from hapq.sequences.averaging import cycle_propagator
from hapq.sequences.pulses import PulseSequence, rf_hamiltonian, rotation_unitary
from hapq.spins.evolution import evolve, fidelity, polarized_state, transverse_magnetization, trotter_propagator
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import Operator
from hapq.utils.helpers import format_sig
from hapq.utils.reporting import write_csv, write_json

logger = logging.getLogger(__name__)


def trotter_cycle(
    seq: PulseSequence, model: SpinSystemModel, h_int: Operator, n_steps: int, symmetrized: bool
) -> Operator:
    """One cycle with every segment split into internal and rf factors."""
    u = np.eye(h_int.dim, dtype=complex)
    for index, segment in enumerate(seq.segments):
        if segment.rotation is not None:
            step = rotation_unitary(segment.rotation, model)
        else:
            h_rf = rf_hamiltonian(seq, index, model)
            step = trotter_propagator([h_int, h_rf], segment.duration, n_steps, symmetrized)
        u = step.matrix @ u
    return Operator(u, "U_trotter_cycle")


def handle_simulate(config: Config, sequence_name: str | None = None, out: str | None = None) -> int:
    """
    Evolve an x-polarized cluster cycle by cycle under a sequence.

    Writes ``simulate_<name>.csv`` with the transverse magnetization after every cycle and a
    summary with the Trotter cross-check of one cycle.

    Args:
        config: Application configuration
        sequence_name: Sequence to run (``simulation.sequence`` if None)
        out: Output directory override

    Returns:
        Exit code
    """

    def body() -> int:
        sim = config.simulation
        name = sequence_name or sim.sequence
        model = cluster_model(config)
        seq = build_sequence(config, model, name)
        h_int = cluster_hamiltonian(config, model, seq)

        exact = cycle_propagator(seq, model, h_int)
        trotter = trotter_cycle(seq, model, h_int, sim.trotter_steps, sim.symmetrized)
        trotter_error = float(np.max(np.abs(exact.matrix - trotter.matrix)))
        trotter_fidelity = fidelity(exact, trotter)

        state = polarized_state(model.n, "x")
        rows = [(0, 0.0, transverse_magnetization(state, model.n))]
        for cycle in range(1, seq.n_repeats + 1):
            state = evolve(state, exact)
            rows.append((cycle, cycle * seq.cycle_time, transverse_magnetization(state, model.n)))

        summary = [
            ("sequence", seq.name or name),
            ("n_spins", model.n),
            ("cycle_time_s", seq.cycle_time),
            ("n_cycles", seq.n_repeats),
            ("trotter_steps", sim.trotter_steps),
            ("trotter_symmetrized", sim.symmetrized),
            ("trotter_max_abs_error", trotter_error),
            ("trotter_fidelity", trotter_fidelity),
            ("final_transverse_magnetization", rows[-1][2]),
        ]

        directory = output_directory(config, out)
        stem = f"simulate_{name}"
        if wants(config, "csv"):
            write_csv(directory / f"{stem}.csv", ["cycle", "time_s", "transverse_magnetization"], rows)
            write_csv(directory / f"{stem}_summary.csv", ["key", "value"], summary)
        if wants(config, "json"):
            write_json(
                directory / f"{stem}.json",
                {
                    "summary": dict(summary),
                    "magnetization": [{"cycle": c, "time_s": t, "value": m} for c, t, m in rows],
                },
            )

        for key, value in summary:
            console.print(f"{key} = {value if isinstance(value, str) else format_sig(value)}", highlight=False)
        console.print(f"[green]💾 Reports saved to: {directory}[/green]")
        return EXIT_OK

    return run_command("simulate", body)
