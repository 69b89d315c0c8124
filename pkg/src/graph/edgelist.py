"""Edge-list text files: first line n, then one 'i j' pair per line."""

from __future__ import annotations

from pathlib import Path

from ..errors import GraphError
from ..utils import ensure_directory
from .network import InterferenceGraph, graph_from_edge_list


def serialize_edge_list(g: InterferenceGraph) -> str:
    lines = [str(g.n)] + [f"{i} {j}" for i, j in g.edges]
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str, source: str = "<string>") -> InterferenceGraph:
    """Parse the edge-list format; '#' starts a comment anywhere on a line."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            if n is None:
                if len(tokens) != 1:
                    raise ValueError("first line must hold the unit count")
                n = int(tokens[0])
                continue
            if len(tokens) != 2:
                raise ValueError("expected 'i j'")
            edges.append((int(tokens[0]), int(tokens[1])))
        except ValueError as e:
            raise GraphError(f"Malformed edge list {source}", f"line {lineno}: {e}") from e
    if n is None:
        raise GraphError(f"Malformed edge list {source}", "missing unit count")
    return graph_from_edge_list(n, edges)


def read_edge_list(path: Path) -> InterferenceGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise GraphError(f"Cannot read edge list {path}", str(e)) from e
    return parse_edge_list(text, source=str(path))


def write_edge_list(g: InterferenceGraph, path: Path) -> Path:
    path = Path(path)
    ensure_directory(path.parent)
    path.write_text(serialize_edge_list(g), encoding="utf-8")
    return path
