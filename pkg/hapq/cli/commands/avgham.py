"""
Avgham command - zeroth-order average Hamiltonian of a sequence on the configured cluster.
"""

import logging

from rich.table import Table

from hapq.cli.commands.common import (
    CROSS_CHECK_WARN,
    EXIT_OK,
    build_sequence,
    cluster_hamiltonian,
    cluster_model,
    console,
    output_directory,
    resolve_dipolar_form,
    run_command,
    wants,
)
from hapq.core.config import Config
from hapq.sequences.averaging import (
    aht_convergence,
    average_hamiltonian,
    effective_propagator,
    offset_scaling,
    stroboscopic_propagator,
    summarize_recoupling,
)
from hapq.sequences.textformat import report_rows, report_to_csv
from hapq.spins.evolution import fidelity
from hapq.utils.helpers import format_sig
from hapq.utils.reporting import write_csv, write_json

logger = logging.getLogger(__name__)

MAX_TERMS_SHOWN = 12


def handle_avgham(config: Config, sequence_name: str, out: str | None = None) -> int:
    """
    Average the cluster Hamiltonian over one cycle and cross-check against exact evolution.

    Writes ``avgham_<name>.csv`` (decomposition), ``avgham_<name>_summary.csv`` and, for
    LG, ``avgham_lg_sweep.csv`` (fidelity vs amplitude ratio).

    Args:
        config: Application configuration
        sequence_name: lg, mrev8, recouple or file
        out: Output directory override

    Returns:
        Exit code
    """

    def body() -> int:
        sim = config.simulation
        model = cluster_model(config)
        seq = build_sequence(config, model, sequence_name)
        h_int = cluster_hamiltonian(config, model, seq)
        report = average_hamiltonian(seq, h_int, model, tolerance=sim.tolerance)

        exact = stroboscopic_propagator(seq, model, h_int)
        cross_check = fidelity(exact, effective_propagator(report, seq.n_repeats))
        if cross_check < CROSS_CHECK_WARN:
            logger.warning(f"Average Hamiltonian of {seq.name} disagrees with exact evolution: fidelity {cross_check:.6f}")
            console.print(
                f"[yellow]⚠️  Cross-check fidelity {cross_check:.6f} is below {CROSS_CHECK_WARN}; "
                "the zeroth-order average is not converged at this amplitude[/yellow]"
            )
        bare = model.couplings.max_abs_hz()
        summary: list[tuple[str, float | str]] = [
            ("sequence", seq.name or sequence_name),
            ("n_spins", model.n),
            ("dipolar_form", resolve_dipolar_form(config, seq)),
            ("cycle_time_s", report.cycle_time),
            ("n_cycles", seq.n_repeats),
            ("max_bare_coupling_hz", bare),
            ("max_two_spin_hz", report.max_two_spin_hz()),
            ("two_spin_relative", report.max_two_spin_hz() / bare if bare else 0.0),
            ("residual_norm_hz", report.residual_norm),
            ("quadrature_nodes", report.quadrature_nodes),
            ("cross_check_fidelity", cross_check),
        ]

        if sequence_name == "mrev8":
            factor, _ = offset_scaling(seq, sim.mrev8_offset, tolerance=sim.tolerance)
            summary.append(("offset_scaling", factor))
        if sequence_name == "recouple":
            recoupling = summarize_recoupling(report, model, sim.plane_a, sim.plane_b)
            summary.extend(
                [
                    ("d_ab_hz", recoupling.d_ab_hz),
                    ("d_ab_label", recoupling.label),
                    ("bare_d_ab_hz", recoupling.bare_hz),
                    ("d_ab_scaling", recoupling.scaling),
                    ("d_ab_sign", recoupling.sign),
                    ("projection", recoupling.projection),
                    ("off_target_hz", recoupling.off_target_hz),
                    ("suppression_ratio", recoupling.suppression_ratio),
                ]
            )

        sweep = []
        if sequence_name == "lg" and sim.sweep_ratios:
            sweep = aht_convergence(model, h_int, sim.sweep_ratios, sim.n_cycles, sim.tolerance)

        directory = output_directory(config, out)
        stem = f"avgham_{sequence_name}"
        if wants(config, "csv"):
            report_to_csv(report, directory / f"{stem}.csv")
            write_csv(directory / f"{stem}_summary.csv", ["key", "value"], summary)
            if sweep:
                write_csv(
                    directory / f"{stem}_sweep.csv",
                    ["ratio", "amplitude_hz", "fidelity"],
                    [(p.ratio, p.amplitude_hz, p.fidelity) for p in sweep],
                )
        if wants(config, "json"):
            write_json(
                directory / f"{stem}.json",
                {
                    "summary": dict(summary),
                    "terms": [{"label": label, "coefficient_hz": value} for label, value in report_rows(report)],
                    "sweep": [
                        {"ratio": p.ratio, "amplitude_hz": p.amplitude_hz, "fidelity": p.fidelity} for p in sweep
                    ],
                },
            )

        table = Table(title=f"Average Hamiltonian: {seq.name or sequence_name}")
        table.add_column("term")
        table.add_column("coefficient (Hz)", justify="right")
        terms = sorted(report.decomposition, key=lambda t: (-abs(t.coefficient_hz), t.label))
        for term in terms[:MAX_TERMS_SHOWN]:
            table.add_row(term.label, format_sig(term.coefficient_hz))
        console.print(table)
        for key, value in summary:
            console.print(f"{key} = {value if isinstance(value, str) else format_sig(value)}", highlight=False)
        console.print(f"[green]💾 Reports saved to: {directory}[/green]")
        return EXIT_OK

    return run_command("avgham", body)
