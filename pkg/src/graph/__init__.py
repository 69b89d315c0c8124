"""Interference graphs: construction, generation, loading and neighbour queries."""

from .network import (
    InterferenceGraph,
    graph_from_edge_list,
    max_degree,
    degrees,
    adjacency,
    neighbor_sums,
    graph_hash,
    empty_graph,
    complete_graph,
    path_graph,
    star_graph,
)
from .generators import Kernel, gen_erdos_renyi, gen_graphon, latent_types
from .edgelist import parse_edge_list, serialize_edge_list, read_edge_list, write_edge_list
from .spec import GRAPH_KINDS, build_graph

__all__ = [
    'InterferenceGraph',
    'graph_from_edge_list',
    'max_degree',
    'degrees',
    'adjacency',
    'neighbor_sums',
    'graph_hash',
    'empty_graph',
    'complete_graph',
    'path_graph',
    'star_graph',
    'Kernel',
    'gen_erdos_renyi',
    'gen_graphon',
    'latent_types',
    'parse_edge_list',
    'serialize_edge_list',
    'read_edge_list',
    'write_edge_list',
    'GRAPH_KINDS',
    'build_graph',
]
