"""Interference graph: construction and neighbour queries."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from ..errors import GraphError, IndexOutOfRange, LengthMismatch, SelfLoop
from ..utils import digest


@dataclass(frozen=True)
class InterferenceGraph:
    """Undirected simple graph over units 0..n-1, immutable after construction."""

    n: int
    neighbors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise GraphError(f"Unit count must be positive, got {self.n}")
        if len(self.neighbors) != self.n:
            raise LengthMismatch("neighbor lists", len(self.neighbors), self.n)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(nb) for nb in self.neighbors), dtype=np.int64, count=self.n)

    @cached_property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Edge pairs with i < j in lexicographic order."""
        return [(i, j) for i, nb in enumerate(self.neighbors) for j in nb if i < j]

    @cached_property
    def adjacency(self) -> sparse.csr_array:
        """0/1 adjacency matrix in CSR form."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter((j for nb in self.neighbors for j in nb), dtype=np.int64,
                              count=int(indptr[-1]))
        data = np.ones(indices.size, dtype=np.float64)
        return sparse.csr_array((data, indices, indptr), shape=(self.n, self.n))

    @cached_property
    def fingerprint(self) -> str:
        pairs = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        return digest("graph", self.n, pairs)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def neighbor_sums(self, state) -> np.ndarray:
        """Z_i = sum of state over the neighbours of i."""
        arr = np.asarray(state)
        if arr.shape[-1] != self.n:
            raise LengthMismatch("state", arr.shape[-1], self.n)
        if arr.ndim == 1:
            sums = self.adjacency @ arr.astype(np.float64)
        else:
            sums = (self.adjacency @ arr.astype(np.float64).T).T
        if arr.dtype == bool or np.issubdtype(arr.dtype, np.integer):
            return np.rint(sums).astype(np.int64)
        return sums


def _from_pair_arrays(n: int, rows: np.ndarray, cols: np.ndarray) -> InterferenceGraph:
    """Symmetric closure of validated pairs, duplicates collapsed."""
    src = np.concatenate([rows, cols]).astype(np.int64)
    dst = np.concatenate([cols, rows]).astype(np.int64)
    if src.size:
        keys = np.unique(src * n + dst)
        src, dst = np.divmod(keys, n)
    bounds = np.searchsorted(src, np.arange(n + 1))
    neighbors = tuple(tuple(int(j) for j in dst[bounds[i]:bounds[i + 1]]) for i in range(n))
    return InterferenceGraph(n=n, neighbors=neighbors)


def graph_from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> InterferenceGraph:
    """Build a graph from index pairs; the result is the symmetric closure."""
    n = int(n)
    if n < 1:
        raise GraphError(f"Unit count must be positive, got {n}")
    pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    if pairs.size:
        bad = pairs[(pairs < 0) | (pairs >= n)]
        if bad.size:
            raise IndexOutOfRange(int(bad[0]), n)
        loops = pairs[pairs[:, 0] == pairs[:, 1]]
        if loops.size:
            raise SelfLoop(int(loops[0, 0]))
    return _from_pair_arrays(n, pairs[:, 0], pairs[:, 1])


def max_degree(g: InterferenceGraph) -> int:
    """Largest neighbour-list length, D_n."""
    return g.max_degree


def degrees(g: InterferenceGraph) -> np.ndarray:
    return g.degrees


def adjacency(g: InterferenceGraph) -> sparse.csr_array:
    return g.adjacency


def neighbor_sums(g: InterferenceGraph, state) -> np.ndarray:
    """Per-unit count of neighbours whose state is 1 (real-valued states allowed)."""
    return g.neighbor_sums(state)


def graph_hash(g: InterferenceGraph) -> str:
    return g.fingerprint


# Deterministic builders

def empty_graph(n: int) -> InterferenceGraph:
    return graph_from_edge_list(n, [])


def complete_graph(n: int) -> InterferenceGraph:
    rows, cols = np.triu_indices(int(n), k=1)
    return _from_pair_arrays(int(n), rows, cols)


def path_graph(n: int) -> InterferenceGraph:
    return graph_from_edge_list(n, [(i, i + 1) for i in range(int(n) - 1)])


def star_graph(n: int) -> InterferenceGraph:
    """Unit 0 is the centre, units 1..n-1 are leaves."""
    return graph_from_edge_list(n, [(0, j) for j in range(1, int(n))])
