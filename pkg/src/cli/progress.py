"""Progress tracking for experiment runs."""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Iterator, Optional

from rich.console import Console
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from ..logs import console as log_console

STEP_NAMES = ["Generate", "Simulate", "Estimate", "Compare", "Report"]
STEP_DESCRIPTIONS = [
    "Build graph, activation model and policy",
    "Run the networked MDP per replication",
    "Apply the requested estimators",
    "Compute exact or mean-field truth",
    "Write estimates, summary and assumptions",
]


class ProgressTracker:
    """Pipeline step display for the experiment command."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or log_console
        self.current_step = 0
        self.step_names = list(STEP_NAMES)

    def show_welcome(self, name: str, description: str = ""):
        """Show experiment banner."""
        body = f"[bold blue]netmrt experiment: {name}[/bold blue]"
        if description:
            body += f"\n[dim]{description}[/dim]"
        self.console.print(Panel.fit(body, border_style="blue"))

    def show_step_overview(self):
        table = Table(title="📋 Pipeline", show_header=True, header_style="bold magenta")
        table.add_column("Step", style="cyan", no_wrap=True)
        table.add_column("Description", style="white")
        table.add_column("Status", justify="center")

        for i, step in enumerate(self.step_names):
            if i < self.current_step:
                status = "[green]✓[/green]"
            elif i == self.current_step:
                status = "[yellow]🔄[/yellow]"
            else:
                status = "[dim]⏳[/dim]"
            table.add_row(f"{i+1}. {step}", STEP_DESCRIPTIONS[i], status)

        self.console.print(table)

    def start_step(self, step_name: str):
        if step_name in self.step_names:
            self.current_step = self.step_names.index(step_name)
        self.console.print(f"[bold cyan]🚀 {step_name}[/bold cyan]")

    def complete_step(self, step_name: str):
        if step_name in self.step_names:
            step_index = self.step_names.index(step_name)
            if step_index >= self.current_step:
                self.current_step = step_index + 1
        self.console.print(f"[green]✅ {step_name}[/green]")

    def show_error(self, step_name: str, error: str):
        self.console.print(f"[red]❌ Failed: {step_name}[/red]")
        self.console.print(f"[red]{error}[/red]")

    def show_completion_summary(self, success: bool = True, out_dir: Optional[str] = None):
        if success:
            self.console.print(Panel.fit(
                "[bold green]✨ Experiment complete[/bold green]"
                + (f"\n[dim]Reports written to {out_dir}[/dim]" if out_dir else ""),
                border_style="green"
            ))
        else:
            self.console.print(Panel.fit(
                "[bold red]❌ Experiment failed[/bold red]\n"
                "[dim]Check the error messages above for details[/dim]",
                border_style="red"
            ))


@contextmanager
def replication_progress(total: int, console: Optional[Console] = None,
                         label: str = "🎲 Replications") -> Iterator[Callable[[int, int], None]]:
    """A rich progress bar; yields the (finished, total) callback run_experiment expects."""
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console or log_console,
        transient=True,
    ) as progress:
        task = progress.add_task(label, total=total)

        def advance(done: int, _total: int) -> None:
            progress.update(task, completed=done)

        yield advance
