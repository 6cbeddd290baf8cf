"""Node partitions and their statistics: C-blocks, D-blocks, I-cells.

C-blocks group nodes sharing a core number; D-blocks cluster full rank
spectra by Euclidean distance; spreading-power blocks cluster the vectors
of infection rates. Pairwise intersections of C- and D-blocks (I-cells)
carry per-cell mean rates and dispersions, the raw material for comparing
how evenly the two partitions slice spreading behavior.

Clustering is plain k-means with deterministic greedy farthest-point
seeding, so a fixed (input, k, seed) always reproduces the same partition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .peeling import DSpectrum
from .sir import InfectionProfile

__all__ = [
    "BlockPartition",
    "ICell",
    "ICellGrid",
    "CBlockDispersion",
    "DispersionReport",
    "dispersion",
    "cblocks",
    "cluster_spectra",
    "cluster_spreading_power",
    "icell_grid",
    "contingency",
    "dispersion_report",
    "kmeans_fit",
]


@dataclass(frozen=True)
class BlockPartition:
    """Dense partition of the node set into non-empty blocks."""

    kind: str
    assignment: np.ndarray
    block_count: int

    def __post_init__(self):
        a = self.assignment
        if a.ndim != 1:
            raise ValueError("assignment must be one-dimensional")
        if self.block_count < 1:
            raise ValueError("a partition needs at least one block")
        if a.size == 0:
            raise ValueError("a partition needs at least one node")
        sizes = np.bincount(a, minlength=self.block_count)
        if a.min() < 0 or a.max() >= self.block_count:
            raise ValueError("block ids must be dense in 0..block_count-1")
        if (sizes == 0).any():
            raise ValueError("empty blocks are not allowed")
        a.setflags(write=False)

    @property
    def node_count(self) -> int:
        return self.assignment.size

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.block_count)

    def members(self, block: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == block)


@dataclass(frozen=True)
class ICell:
    """One C-block x D-block intersection; empty cells carry null statistics."""

    members: tuple[int, ...]
    mean_rate: float | None
    dispersion: float | None

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ICellGrid:
    """Grid of I-cells: rows are C-block ids, columns are D-block ids."""

    row_ids: tuple[int, ...]
    col_ids: tuple[int, ...]
    cells: tuple[tuple[ICell, ...], ...]
    rate_label: str

    def cell(self, row: int, col: int) -> ICell:
        return self.cells[row][col]


@dataclass(frozen=True)
class CBlockDispersion:
    """Global dispersion of one C-block next to those of its refining I-cells."""

    block: int
    size: int
    cell_count: int
    global_dispersion: float | None
    icell_dispersions: tuple[float | None, ...]
    mean_icell_dispersion: float | None


@dataclass(frozen=True)
class DispersionReport:
    rows: tuple[CBlockDispersion, ...]


def dispersion(values) -> float | None:
    """Variance-to-mean ratio (population variance); None when undefined.

    Undefined for fewer than two values or a zero mean.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        return None
    mean = arr.mean()
    if mean == 0:
        return None
    return float(arr.var() / mean)


# -- partitions ----------------------------------------------------------------


def cblocks(spectra: DSpectrum) -> BlockPartition:
    """One block per distinct core number, block ids in ascending core order."""
    cores = spectra.column(0)
    values = np.unique(cores)
    assignment = np.searchsorted(values, cores).astype(np.int64)
    return BlockPartition("C-block", assignment, int(values.size))


def _zscore(X: np.ndarray) -> np.ndarray:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    return (X - mean) / scale


def kmeans_fit(
    points: np.ndarray, k: int, seed: int, *, max_iter: int = 200, tol: float = 1e-9
) -> tuple[np.ndarray, np.ndarray, float]:
    """Euclidean k-means with deterministic greedy farthest-point seeding.

    The seed picks the first center; every later center is the point
    farthest from the chosen set (ties to the lowest index). Assignment
    ties break to the lower block id. If ``k`` exceeds the number of
    distinct rows it is reduced with a warning. Returns
    ``(labels, centers, inertia)``.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("points must be a 2d array")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"cluster count must lie in [1, {n}], got {k}")
    distinct = np.unique(X, axis=0).shape[0]
    if k > distinct:
        warnings.warn(
            f"requested {k} clusters but only {distinct} distinct rows; using {distinct}",
            stacklevel=2,
        )
        k = distinct

    rng = np.random.default_rng(seed)
    first = int(rng.integers(n))
    centers = np.empty((k, X.shape[1]), dtype=np.float64)
    centers[0] = X[first]
    nearest = ((X - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        centers[j] = X[int(np.argmax(nearest))]
        nearest = np.minimum(nearest, ((X - centers[j]) ** 2).sum(axis=1))

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        point_cost = d2[np.arange(n), labels]
        for b in range(k):
            if not (labels == b).any():
                far = int(np.argmax(point_cost))
                labels[far] = b
                point_cost[far] = 0.0
        new_centers = np.empty_like(centers)
        for b in range(k):
            new_centers[b] = X[labels == b].mean(axis=0)
        shift = float(np.abs(new_centers - centers).max())
        centers = new_centers
        if shift < tol:
            break
    inertia = float(((X - centers[labels]) ** 2).sum())
    return labels, centers, inertia


def cluster_spectra(
    spectra: DSpectrum, k: int, seed: int, *, standardize: bool = False
) -> BlockPartition:
    """D-blocks: k-means over the rows of the spectrum matrix."""
    X = spectra.matrix.astype(np.float64)
    if standardize:
        X = _zscore(X)
    labels, _, _ = kmeans_fit(X, k, seed)
    return BlockPartition("D-block", labels, int(labels.max()) + 1)


def cluster_spreading_power(
    profiles: Sequence[InfectionProfile], k: int, seed: int
) -> BlockPartition:
    """Spreading-power blocks: k-means over the infection-rate vectors."""
    ordered = sorted(profiles, key=lambda p: p.node)
    if [p.node for p in ordered] != list(range(len(ordered))):
        raise ValueError("profiles must cover nodes 0..n-1 exactly once")
    X = np.vstack([p.rates for p in ordered]).astype(np.float64)
    labels, _, _ = kmeans_fit(X, k, seed)
    return BlockPartition("spreading-power", labels, int(labels.max()) + 1)


# -- cross statistics ------------------------------------------------------------


def _check_same_nodes(a: BlockPartition, b: BlockPartition) -> None:
    if a.node_count != b.node_count:
        raise ValueError("partitions cover different node sets")


def icell_grid(
    cb: BlockPartition, db: BlockPartition, rates, rate_label: str
) -> ICellGrid:
    """All pairwise C-block x D-block intersections with per-cell statistics.

    ``rates`` are per-node infection rates at the designated probability
    named by ``rate_label``. Empty intersections produce null cells.
    """
    _check_same_nodes(cb, db)
    values = np.asarray(rates, dtype=np.float64)
    if values.shape != (cb.node_count,):
        raise ValueError("need one rate per node")
    rows = []
    for r in range(cb.block_count):
        row = []
        in_row = cb.assignment == r
        for c in range(db.block_count):
            members = np.flatnonzero(in_row & (db.assignment == c))
            if members.size == 0:
                row.append(ICell((), None, None))
            else:
                cell_rates = values[members]
                row.append(
                    ICell(
                        tuple(members.tolist()),
                        float(cell_rates.mean()),
                        dispersion(cell_rates),
                    )
                )
        rows.append(tuple(row))
    return ICellGrid(
        tuple(range(cb.block_count)),
        tuple(range(db.block_count)),
        tuple(rows),
        rate_label,
    )


def contingency(a: BlockPartition, b: BlockPartition) -> np.ndarray:
    """Counts matrix: entry (i, j) is the size of block_i(a) & block_j(b)."""
    _check_same_nodes(a, b)
    flat = a.assignment * b.block_count + b.assignment
    counts = np.bincount(flat, minlength=a.block_count * b.block_count)
    return counts.reshape(a.block_count, b.block_count)


def dispersion_report(
    cb: BlockPartition, grid: ICellGrid, rates
) -> DispersionReport:
    """Global per-C-block dispersions next to their refining I-cell dispersions.

    Cells with null dispersion (empty, singleton, or zero-mean) are skipped
    when averaging a block's I-cell dispersions.
    """
    if grid.row_ids != tuple(range(cb.block_count)):
        raise ValueError("grid rows do not match the C-block partition")
    values = np.asarray(rates, dtype=np.float64)
    rows = []
    for r in range(cb.block_count):
        members = cb.members(r)
        cells = [cell for cell in grid.cells[r] if cell.size > 0]
        cell_disps = tuple(cell.dispersion for cell in cells)
        defined = [d for d in cell_disps if d is not None]
        rows.append(
            CBlockDispersion(
                block=r,
                size=int(members.size),
                cell_count=len(cells),
                global_dispersion=dispersion(values[members]),
                icell_dispersions=cell_disps,
                mean_icell_dispersion=float(np.mean(defined)) if defined else None,
            )
        )
    return DispersionReport(tuple(rows))
