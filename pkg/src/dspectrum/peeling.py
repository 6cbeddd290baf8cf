"""Maximal D-chains by threshold peeling: per-order ranks, spectra, verification.

A D-chain of order ``t <= 0`` is a nested sequence of node sets
``S_0 >= S_1 >= ...`` (``S_0`` = all nodes) where every member of level ``i``
keeps at least ``i`` neighbors inside level ``max(0, i + t)``. Each order has
a unique maximal chain; the rank of a node is the deepest level containing
it. Order 0 reproduces classical core numbers, orders at or below
``-max_degree`` reproduce plain degrees, and the orders in between
interpolate. Collecting the ranks of all orders ``0, -1, ..., -max_degree``
column by column gives the graph's :class:`DSpectrum`.

For negative orders the maximal chain decomposes into ``-t`` interleaved
residue chains, each grown by rounds of *simultaneous* deletion: one pass
removes exactly the nodes whose current degree is below the level threshold,
with no cascading inside the round (the membership condition references the
predecessor level, not the level being built). Cascading deletion is correct
only for order 0, where the condition is self-referential.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import Graph

__all__ = [
    "ChainRanks",
    "DChain",
    "DSpectrum",
    "ChainCheck",
    "SpectrumMismatchError",
    "core_numbers",
    "core_peel",
    "chain_level",
    "ranks_for_order",
    "full_spectrum",
    "chain_from_ranks",
    "verify_chain",
    "first_spectrum_mismatch",
]


@dataclass(frozen=True)
class ChainRanks:
    """Per-node ranks for one chain order: one column of the spectrum."""

    order_t: int
    ranks: np.ndarray

    def __post_init__(self):
        self.ranks.setflags(write=False)


@dataclass(frozen=True)
class DChain:
    """Explicit nested level sets of one chain, ``levels[0]`` = all nodes."""

    order_t: int
    levels: tuple[frozenset[int], ...]

    @property
    def length(self) -> int:
        return len(self.levels) - 1


@dataclass(frozen=True)
class DSpectrum:
    """Rank matrix over all orders: column ``c`` holds the ranks for order ``-c``.

    Column 0 equals the core-number vector and column ``delta`` equals the
    degree vector; rows are non-increasing left to right.
    """

    matrix: np.ndarray
    delta: int

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def node_count(self) -> int:
        return self.matrix.shape[0]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(-c for c in range(self.delta + 1))

    def column(self, t: int) -> np.ndarray:
        if not -self.delta <= t <= 0:
            raise IndexError(f"order {t} outside [{-self.delta}, 0]")
        return self.matrix[:, -t]


@dataclass(frozen=True)
class ChainCheck:
    """Outcome of :func:`verify_chain`; falsy when a violation was found."""

    valid: bool
    kind: str | None = None
    level: int | None = None
    node: int | None = None
    message: str | None = None

    def __bool__(self) -> bool:
        return self.valid


class SpectrumMismatchError(RuntimeError):
    """The two spectrum algorithms disagreed; carries the first (node, order)."""

    def __init__(self, node: int, order: int):
        self.node = node
        self.order = order
        super().__init__(f"spectra differ first at node {node}, order {order}")


# -- order 0: classical cores -------------------------------------------------


def core_numbers(g: Graph) -> np.ndarray:
    """Core number of every node, by bucketed min-degree peeling."""
    n = g.node_count
    core = g.degrees.astype(np.int64).tolist()
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    order = np.argsort(g.degrees, kind="stable")
    vert = order.tolist()
    pos = np.empty(n, dtype=np.int64)
    pos[order] = np.arange(n)
    pos = pos.tolist()
    md = g.max_degree()
    counts = np.bincount(g.degrees, minlength=md + 1)
    bin_start = np.zeros(md + 2, dtype=np.int64)
    np.cumsum(counts, out=bin_start[1:])
    bin_start = bin_start.tolist()

    indptr, indices = g.csr()
    ptr = indptr.tolist()
    nbr = indices.tolist()

    for i in range(n):
        v = vert[i]
        dv = core[v]
        for j in range(ptr[v], ptr[v + 1]):
            u = nbr[j]
            du = core[u]
            if du > dv:
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu], vert[pw] = w, u
                    pos[u], pos[w] = pw, pu
                bin_start[du] = pw + 1
                core[u] = du - 1
    return np.asarray(core, dtype=np.int64)


def core_peel(g: Graph, k: int) -> frozenset[int]:
    """Classical k-core by cascading deletion of nodes of degree < k."""
    if k <= 0:
        raise ValueError("k must be positive")
    n = g.node_count
    deg = g.degrees.astype(np.int64).tolist()
    alive = [True] * n
    stack = [v for v in range(n) if deg[v] < k]
    indptr, indices = g.csr()
    ptr = indptr.tolist()
    nbr = indices.tolist()
    while stack:
        v = stack.pop()
        if not alive[v]:
            continue
        alive[v] = False
        for j in range(ptr[v], ptr[v + 1]):
            u = nbr[j]
            if alive[u]:
                deg[u] -= 1
                if deg[u] == k - 1:
                    stack.append(u)
    return frozenset(v for v in range(n) if alive[v])


# -- negative orders: round-based peeling -------------------------------------


def _decompose_level(k: int, t: int) -> tuple[int, int]:
    """Unique split k = i - m*t with 1 <= i <= -t, m >= 0."""
    step = -t
    i = ((k - 1) % step) + 1
    m = (k - i) // step
    return i, m


def chain_level(g: Graph, t: int, k: int) -> frozenset[int]:
    """Node set of level ``k`` of the maximal chain of negative order ``t``.

    Runs ``m + 1`` rounds of simultaneous deletion with thresholds
    ``i, i - t, ..., i - m*t = k`` where ``k = i - m*t`` is the unique
    decomposition with ``1 <= i <= -t``. Each round measures degrees in the
    graph as it stood before the round; there is no cascading inside a round.
    """
    if t >= 0:
        raise ValueError("chain_level needs a negative order; use core_peel for order 0")
    if k <= 0:
        raise ValueError("level must be positive")
    i, m = _decompose_level(k, t)
    step = -t
    n = g.node_count
    alive = np.ones(n, dtype=bool)
    deg = g.degrees.astype(np.int64)
    for j in range(m + 1):
        threshold = i + j * step
        _drop_below(g, alive, deg, threshold)
        if not alive.any():
            break
    return frozenset(np.flatnonzero(alive).tolist())


def _drop_below(g: Graph, alive: np.ndarray, deg: np.ndarray, threshold: int) -> None:
    """One simultaneous removal pass: kill alive nodes with deg < threshold."""
    drop = alive & (deg < threshold)
    if not drop.any():
        return
    alive &= ~drop
    flat, _ = g.gather_neighbors(np.flatnonzero(drop))
    if flat.size:
        deg -= np.bincount(flat, minlength=deg.size)


def ranks_for_order(g: Graph, t: int) -> ChainRanks:
    """Ranks of all nodes for one order ``t <= 0``.

    For ``t < 0`` this grows all ``-t`` interleaved residue chains
    ``H_i >= H_{i-t} >= H_{i-2t} >= ...`` (``i = 1..-t``) up to the provably
    empty level ``max_degree + 1`` and records the deepest level retaining
    each node. For ``t = 0`` it returns core numbers. The result coincides
    with the fixed point reached by the t-system dynamics started from the
    degree vector (see :mod:`dspectrum.dynamics`).
    """
    if t > 0:
        raise ValueError("ranks for positive orders are identically zero; not computed")
    if t == 0:
        return ChainRanks(0, core_numbers(g))
    n = g.node_count
    delta = g.max_degree()
    ranks = np.zeros(n, dtype=np.int64)
    step = -t
    base = g.degrees.astype(np.int64)
    for residue in range(1, step + 1):
        if residue > delta + 1:
            break
        alive = np.ones(n, dtype=bool)
        deg = base.copy()
        level = residue
        while level <= delta + 1:
            _drop_below(g, alive, deg, level)
            if not alive.any():
                break
            np.maximum(ranks, level, out=ranks, where=alive)
            level += step
    return ChainRanks(t, ranks)


def full_spectrum(g: Graph) -> DSpectrum:
    """Assemble ranks for every order 0..-max_degree into the spectrum matrix."""
    delta = g.max_degree()
    matrix = np.empty((g.node_count, delta + 1), dtype=np.int64)
    for c in range(delta + 1):
        matrix[:, c] = ranks_for_order(g, -c).ranks
    return DSpectrum(matrix, delta)


# -- chains as explicit level sets --------------------------------------------


def chain_from_ranks(ranks: np.ndarray | Sequence[int], t: int) -> DChain:
    """Rebuild the maximal chain's level sets from its rank vector."""
    arr = np.asarray(ranks, dtype=np.int64)
    top = int(arr.max()) if arr.size else 0
    levels = [frozenset(range(arr.size))]
    for i in range(1, top + 1):
        levels.append(frozenset(np.flatnonzero(arr >= i).tolist()))
    return DChain(int(t), tuple(levels))


def _membership_counts(g: Graph, member_mask: np.ndarray) -> np.ndarray:
    """For every node, how many of its neighbors fall in the masked set."""
    hits = member_mask[g._indices]
    return np.bincount(g.owner_index[hits], minlength=g.node_count)


def verify_chain(g: Graph, chain: DChain) -> ChainCheck:
    """Check a chain against the definition, level by level.

    Validates (a) that levels are nested, non-empty and rooted at the full
    node set, (b) the membership condition -- every node of level ``i`` has
    at least ``i`` neighbors inside level ``max(0, i + t)`` -- and (c) local
    maximality: no single missing node could be added to any level (or
    appended as a new deepest level) while keeping (b). Returns the first
    violation found, in ascending (level, node) order.
    """
    levels = chain.levels
    if not levels:
        raise ValueError("chain must contain at least the root level")
    t = chain.order_t
    if t > 0:
        raise ValueError("chains are defined for non-positive orders")
    n = g.node_count
    top = len(levels) - 1

    masks = np.zeros((top + 1, n), dtype=bool)
    for i, level in enumerate(levels):
        for v in level:
            if not 0 <= v < n:
                raise ValueError(f"level {i} contains node {v} outside the graph")
        masks[i, list(level)] = True

    if not masks[0].all():
        missing = int(np.flatnonzero(~masks[0])[0])
        return ChainCheck(False, "root", 0, missing, "level 0 must contain every node")

    for i in range(1, top + 1):
        if not levels[i]:
            return ChainCheck(False, "empty-level", i, None, f"level {i} is empty")
        stray = masks[i] & ~masks[i - 1]
        if stray.any():
            v = int(np.flatnonzero(stray)[0])
            return ChainCheck(
                False, "nesting", i, v, f"node {v} in level {i} is missing from level {i - 1}"
            )

    for i in range(1, top + 1):
        ref = masks[max(0, i + t)]
        counts = _membership_counts(g, ref)
        bad = masks[i] & (counts < i)
        if bad.any():
            v = int(np.flatnonzero(bad)[0])
            return ChainCheck(
                False,
                "degree",
                i,
                v,
                f"node {v} has {int(counts[v])} neighbors in level {max(0, i + t)}, needs {i}",
            )

    empty = np.zeros(n, dtype=bool)
    for i in range(1, top + 2):
        current = masks[i] if i <= top else empty
        candidates = masks[i - 1] & ~current
        if not candidates.any():
            continue
        ref_index = max(0, i + t)
        ref = masks[ref_index] if ref_index <= top else empty
        counts = _membership_counts(g, ref)
        extend = candidates & (counts >= i)
        if extend.any():
            v = int(np.flatnonzero(extend)[0])
            return ChainCheck(
                False,
                "maximality",
                i,
                v,
                f"node {v} could join level {i}: it has {int(counts[v])} neighbors "
                f"in level {ref_index}",
            )

    return ChainCheck(True)


def first_spectrum_mismatch(a: DSpectrum, b: DSpectrum) -> tuple[int, int] | None:
    """First (node, order) where two spectra disagree, or None when equal."""
    if a.matrix.shape != b.matrix.shape:
        raise ValueError(
            f"spectra have different shapes {a.matrix.shape} vs {b.matrix.shape}"
        )
    diff = np.argwhere(a.matrix != b.matrix)
    if diff.size == 0:
        return None
    node, col = diff[0]
    return int(node), -int(col)
