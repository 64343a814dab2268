"""
Main CLI entry point for hapq.
"""

import typer
from dotenv import load_dotenv
from rich.console import Console
from rich.panel import Panel
from rich.text import Text

from hapq import __version__
from hapq.cli.commands.avgham import handle_avgham
from hapq.cli.commands.common import EXIT_USAGE, SEQUENCE_NAMES, error_console, run_command
from hapq.cli.commands.couplings import handle_couplings
from hapq.cli.commands.gate import handle_gate
from hapq.cli.commands.plan import handle_plan
from hapq.cli.commands.simulate import handle_simulate
from hapq.core.config import Config
from hapq.utils.logging import setup_logging

app = typer.Typer(
    name="hapq",
    help="⚛️ hapq - spin dynamics and device planning for hydroxyapatite plane qubits",
    rich_markup_mode="rich",
)

console = Console()

CONFIG_OPTION = typer.Option(..., "--config", "-c", help="Config file (section.key = value lines)")
OUT_OPTION = typer.Option(None, "--out", "-o", help="Output directory (default: output.directory)")
FORMAT_OPTION = typer.Option(None, "--format", "-f", help="Report format: csv, json or both")
SEED_OPTION = typer.Option(None, "--seed", help="Random seed (reserved; every path is deterministic)")
VERBOSE_OPTION = typer.Option(False, "--verbose", "-v", help="Show debug logging")


def _load(config_path: str, fmt: str | None, verbose: bool) -> Config:
    """Read the config file, apply CLI overrides and set up logging; exit 2 on config errors."""
    load_dotenv()
    config: Config | None = None

    def body() -> int:
        nonlocal config
        config = Config.from_file(config_path)
        if fmt is not None:
            if fmt not in ("csv", "json", "both"):
                error_console.print(f"[red]❌ Invalid format: {fmt}. Must be csv, json or both[/red]")
                return EXIT_USAGE
            config.output.format = fmt  # type: ignore[assignment]
        return 0

    code = run_command("config", body)
    if code or config is None:
        raise typer.Exit(code or EXIT_USAGE)
    setup_logging(config.logging, verbose)
    return config


@app.command()
def couplings(
    config: str = CONFIG_OPTION,
    out: str | None = OUT_OPTION,
    fmt: str | None = FORMAT_OPTION,
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """🔗 Dipolar coupling table of the configured cluster."""
    raise typer.Exit(handle_couplings(_load(config, fmt, verbose), out))


@app.command()
def plan(
    config: str = CONFIG_OPTION,
    out: str | None = OUT_OPTION,
    fmt: str | None = FORMAT_OPTION,
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """📐 Device capacity and overlap feasibility (exit 3 when infeasible)."""
    raise typer.Exit(handle_plan(_load(config, fmt, verbose), out))


@app.command()
def avgham(
    sequence: str = typer.Argument(..., help=f"Sequence: {', '.join(SEQUENCE_NAMES)}"),
    config: str = CONFIG_OPTION,
    out: str | None = OUT_OPTION,
    fmt: str | None = FORMAT_OPTION,
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """🧮 Average Hamiltonian of a sequence on the configured cluster."""
    raise typer.Exit(handle_avgham(_load(config, fmt, verbose), sequence, out))


@app.command()
def simulate(
    sequence: str | None = typer.Argument(None, help="Sequence (default: simulation.sequence)"),
    config: str = CONFIG_OPTION,
    out: str | None = OUT_OPTION,
    fmt: str | None = FORMAT_OPTION,
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """🌀 Stroboscopic evolution of a sequence with a Trotter cross-check."""
    raise typer.Exit(handle_simulate(_load(config, fmt, verbose), sequence, out))


@app.command()
def gate(
    plane_a: int = typer.Argument(..., help="Control plane"),
    plane_b: int = typer.Argument(..., help="Target plane"),
    config: str = CONFIG_OPTION,
    out: str | None = OUT_OPTION,
    fmt: str | None = FORMAT_OPTION,
    seed: int | None = SEED_OPTION,
    verbose: bool = VERBOSE_OPTION,
) -> None:
    """🔀 CNOT between two planes: ideal and error-term fidelities."""
    raise typer.Exit(handle_gate(_load(config, fmt, verbose), plane_a, plane_b, out))


@app.command()
def version() -> None:
    """Show version information."""
    console.print(f"⚛️ [bold blue]hapq[/bold blue] v{__version__}")
    console.print("Spin dynamics and device planning for hydroxyapatite plane qubits")


@app.command()
def info() -> None:
    """Show information about hapq."""
    console.print(
        Panel(
            Text.assemble(
                ("⚛️ hapq ", "bold blue"),
                f"v{__version__}\n\n",
                ("Solid-state NMR plane-qubit simulator and device planner.\n\n", ""),
                ("Features: ", "bold"),
                ("Dipolar couplings • Average Hamiltonians • CNOT synthesis • Capacity planning\n\n", "dim"),
                ("Commands:\n", "bold"),
                ("• hapq couplings --config FILE - Coupling table\n", "dim"),
                ("• hapq plan --config FILE - Device plan\n", "dim"),
                ("• hapq avgham SEQUENCE --config FILE - Average Hamiltonian\n", "dim"),
                ("• hapq simulate [SEQUENCE] --config FILE - Stroboscopic evolution\n", "dim"),
                ("• hapq gate A B --config FILE - CNOT fidelity\n", "dim"),
            ),
            title="About hapq",
            border_style="blue",
        )
    )


if __name__ == "__main__":
    app()
