"""Logging setup: library modules log, the CLI renders through rich."""

from __future__ import annotations

import logging

from rich.console import Console
from rich.logging import RichHandler

# Shared stderr console so log lines and progress bars do not interleave badly
console = Console(stderr=True)


def configure_logging(level: str = "INFO") -> None:
    """Install a RichHandler on the root logger (idempotent)."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True, markup=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level.upper())
