"""Graph specs from experiment configs: ``{"kind": ..., "n": ..., ...}``."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

from ..errors import ConfigInvalid
from .edgelist import read_edge_list
from .generators import gen_erdos_renyi, gen_graphon
from .network import (
    InterferenceGraph,
    complete_graph,
    empty_graph,
    graph_from_edge_list,
    path_graph,
    star_graph,
)

GRAPH_KINDS = ("erdos_renyi", "graphon", "complete", "empty", "path", "star", "edges", "file")


def build_graph(spec: Mapping[str, Any]) -> InterferenceGraph:
    """Build a graph from a JSON-style spec; graphon specs discard latent types."""
    kind = spec.get("kind")
    if kind == "erdos_renyi":
        return gen_erdos_renyi(int(spec["n"]), float(spec["rho"]), int(spec.get("seed", 0)))
    if kind == "graphon":
        g, _ = gen_graphon(int(spec["n"]), float(spec["rho"]), spec.get("kernel"), int(spec.get("seed", 0)))
        return g
    if kind == "complete":
        return complete_graph(int(spec["n"]))
    if kind == "empty":
        return empty_graph(int(spec["n"]))
    if kind == "path":
        return path_graph(int(spec["n"]))
    if kind == "star":
        return star_graph(int(spec["n"]))
    if kind == "edges":
        return graph_from_edge_list(int(spec["n"]), spec.get("edges", []))
    if kind == "file":
        return read_edge_list(Path(spec["path"]))
    raise ConfigInvalid(f"Unknown graph kind '{kind}'", f"choose {', '.join(GRAPH_KINDS)}")
