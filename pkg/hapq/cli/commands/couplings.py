"""
Couplings command - coupling table of the configured cluster and the reference-pair check.
"""

import logging

from rich.table import Table

from hapq.cli.commands.common import EXIT_OK, console, lattice_spec, output_directory, run_command, wants
from hapq.core.config import Config
from hapq.core.exceptions import ValidationError
from hapq.structure.couplings import coupling_table, coupling_table_to_csv, reference_coupling_rows
from hapq.structure.lattice import build_lattice, select_sites, sites_to_csv
from hapq.utils.helpers import format_sig
from hapq.utils.reporting import write_csv, write_json

logger = logging.getLogger(__name__)


def _reference_table() -> Table:
    table = Table(title="Reference couplings")
    table.add_column("pair")
    table.add_column("computed (Hz)", justify="right")
    table.add_column("quoted |d| (Hz)", justify="right")
    table.add_column("rel. error", justify="right")
    table.add_column("ok")
    for row in reference_coupling_rows():
        table.add_row(
            row.label,
            format_sig(row.computed_hz, 4),
            format_sig(row.quoted_hz),
            format_sig(row.relative_error, 3),
            "[green]yes[/green]" if row.within_tolerance else "[red]no[/red]",
        )
    return table


def handle_couplings(config: Config, out: str | None = None) -> int:
    """
    Write the coupling table of the configured cluster and print the reference summary.

    Args:
        config: Application configuration
        out: Output directory override

    Returns:
        Exit code
    """

    def body() -> int:
        spec = lattice_spec(config)
        sites = select_sites(build_lattice(spec), config.simulation.planes, config.simulation.chains)
        if not sites:
            raise ValidationError("Cluster selection contains no sites", field="simulation.planes")
        table = coupling_table(sites, spec.field_axis, config.simulation.cutoff)
        directory = output_directory(config, out)

        if wants(config, "csv"):
            coupling_table_to_csv(table, directory / "couplings.csv")
            sites_to_csv(sites, directory / "sites.csv")
            write_csv(
                directory / "reference_couplings.csv",
                ["pair", "computed_hz", "quoted_hz", "relative_error", "within_tolerance"],
                [
                    (r.label, r.computed_hz, r.quoted_hz, r.relative_error, r.within_tolerance)
                    for r in reference_coupling_rows()
                ],
            )
        if wants(config, "json"):
            write_json(
                directory / "couplings.json",
                {
                    "cutoff_hz": table.cutoff_hz,
                    "entries": [
                        {"i": e.i, "j": e.j, "d_hz": e.d_hz, "r_m": e.r, "theta_rad": e.theta} for e in table
                    ],
                },
            )

        console.print(_reference_table())
        console.print(
            f"{len(sites)} sites, {len(table)} couplings with |d| >= {format_sig(table.cutoff_hz)} Hz"
            + (f" (largest {format_sig(table.max_abs_hz())} Hz)" if len(table) else "")
        )
        if table.warning:
            console.print(f"[yellow]⚠️ {table.warning}[/yellow]")
        console.print(f"[green]💾 Reports saved to: {directory}[/green]")
        return EXIT_OK

    return run_command("couplings", body)
