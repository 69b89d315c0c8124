"""Per-unit (y, w) cell counts and the cell-mean estimators built on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyCell, ValidationError
from ..simulate import Trajectory


@dataclass(frozen=True, eq=False)
class CellTable:
    """counts[i, y, w] visits of cell (y, w) by unit i; hits[i, y, w] of them followed by Y = 1."""

    counts: np.ndarray
    hits: np.ndarray

    def empty_cells(self, units=None) -> list[tuple[int, int, int]]:
        counts = self.counts if units is None else self.counts[np.atleast_1d(units)]
        index = np.arange(self.counts.shape[0]) if units is None else np.atleast_1d(units)
        return [(int(index[k]), int(y), int(w)) for k, y, w in np.argwhere(counts == 0)]

    def means(self) -> np.ndarray:
        """fhat for every unit and cell; raises EmptyCell listing every unvisited cell."""
        empty = self.empty_cells()
        if empty:
            raise EmptyCell(empty)
        return self.hits / self.counts


def cell_table(traj: Trajectory) -> CellTable:
    """Count cell visits over t = 0..T-1 with the outcome at t + 1."""
    now = traj.Y[:-1]
    nxt = traj.Y[1:].astype(np.int64)
    counts = np.zeros((traj.n, 2, 2), dtype=np.int64)
    hits = np.zeros((traj.n, 2, 2), dtype=np.int64)
    for y in (0, 1):
        for w in (0, 1):
            mask = (now == y) & (traj.W == w)
            counts[:, y, w] = mask.sum(axis=0)
            hits[:, y, w] = (mask * nxt).sum(axis=0)
    return CellTable(counts=counts, hits=hits)


def fhat(traj: Trajectory, i: int, y: int, w: int) -> float:
    """Share of visits to cell (y, w) of unit i followed by an outcome of 1."""
    table = cell_table(traj)
    count = int(table.counts[i, y, w])
    if count == 0:
        raise EmptyCell([(int(i), int(y), int(w))])
    return float(table.hits[i, y, w]) / count


def abcd_from_cells(means: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Plug-in (a, b, c, d) from cell means indexed [..., y, w]."""
    f00 = means[..., 0, 0]
    f01 = means[..., 0, 1]
    f10 = means[..., 1, 0]
    f11 = means[..., 1, 1]
    return f00, f01 - f00, f10 - f00, f11 + f00 - f01 - f10


def abcd_hat(traj: Trajectory, i: int) -> tuple[float, float, float, float]:
    table = cell_table(traj)
    empty = table.empty_cells(int(i))
    if empty:
        raise EmptyCell(empty)
    a, b, c, d = abcd_from_cells(table.hits[i] / table.counts[i])
    return float(a), float(b), float(c), float(d)


def phat_all(traj: Trajectory) -> np.ndarray:
    """Time average of Y over t = 1..T for every unit."""
    if traj.T < 1:
        raise ValidationError("Outcome averages need at least one transition", "T = 0")
    return traj.Y[1:].mean(axis=0)


def phat(traj: Trajectory, i: int) -> float:
    return float(phat_all(traj)[int(i)])
