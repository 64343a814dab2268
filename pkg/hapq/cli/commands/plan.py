"""
Plan command - device capacity and overlap feasibility.
"""

from hapq.cli.commands.common import EXIT_INFEASIBLE, EXIT_OK, console, output_directory, run_command, wants
from hapq.core.config import Config
from hapq.planner.device import device_plan, plan_to_text
from hapq.utils.reporting import write_json, write_text


def handle_plan(config: Config, out: str | None = None) -> int:
    """
    Compute the device plan from the ``device`` and ``lattice`` sections.

    The report is written even when the plan is infeasible.

    Returns:
        0 when feasible, 3 when a feasibility check fails, 2 on config errors
    """

    def body() -> int:
        plan = device_plan(config.require_device(), config.lattice)
        directory = output_directory(config, out)
        text = plan_to_text(plan)
        write_text(directory / "plan.txt", text)
        if wants(config, "json"):
            write_json(directory / "plan.json", plan.model_dump_json(indent=2))

        console.print(text, end="", markup=False, highlight=False)
        if plan.feasible:
            console.print("[green]✅ Plan is feasible[/green]")
            return EXIT_OK
        for issue in plan.issues:
            console.print(f"[yellow]⚠️ {issue}[/yellow]")
        return EXIT_INFEASIBLE

    return run_command("plan", body)
