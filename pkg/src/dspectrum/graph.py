"""Simple undirected graphs: edge-list ingest, degree statistics, epidemic threshold.

Graphs are simplified on ingest: self-loops and duplicate edges are dropped
silently but tallied in an :class:`IngestReport`. Node identity is dual --
external string labels are preserved for output while all computation runs
on dense 0-based indices. A :class:`Graph` is immutable after construction
and safe to share between concurrent tasks.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "Graph",
    "IngestReport",
    "EdgeListParseError",
    "ThresholdUndefinedError",
    "load_edge_list",
    "dump_edge_list",
    "degree",
    "max_degree",
    "epidemic_threshold",
    "connected_components",
]


class EdgeListParseError(ValueError):
    """A malformed edge-list line; carries the offending 1-based line number."""

    def __init__(self, line_number: int, line: str, reason: str):
        self.line_number = line_number
        self.line = line
        super().__init__(f"line {line_number}: {reason}: {line!r}")


class ThresholdUndefinedError(ValueError):
    """Raised when <k^2> - <k> <= 0, e.g. on a perfect matching."""


@dataclass(frozen=True)
class IngestReport:
    """Tallies of artifacts dropped or noticed while simplifying an edge list."""

    edges_kept: int
    self_loops_dropped: int
    duplicate_edges_dropped: int
    isolated_nodes: int


class Graph:
    """Immutable simple undirected graph in CSR adjacency form.

    Parameters
    ----------
    node_count : int
        Number of nodes; indices run 0..node_count-1.
    edges : iterable of (int, int)
        Undirected edges. Self-loops, duplicates (in either orientation) and
        out-of-range endpoints are rejected; use :func:`load_edge_list` to
        ingest dirty data.
    labels : sequence of str, optional
        External node labels, one per index. Defaults to decimal strings.
    """

    __slots__ = ("node_count", "labels", "_indptr", "_indices", "_degrees", "_owner")

    def __init__(
        self,
        node_count: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ):
        n = int(node_count)
        if n < 0:
            raise ValueError("node_count must be non-negative")
        pairs = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if pairs.size:
            if pairs.min() < 0 or pairs.max() >= n:
                raise ValueError("edge endpoint out of range")
            if (pairs[:, 0] == pairs[:, 1]).any():
                raise ValueError("self-loops are not allowed")
            canon = np.sort(pairs, axis=1)
            order = np.lexsort((canon[:, 1], canon[:, 0]))
            canon = canon[order]
            if len(canon) > 1 and (np.diff(canon, axis=0) == 0).all(axis=1).any():
                raise ValueError("duplicate edges are not allowed")
            both = np.concatenate([canon, canon[:, ::-1]])
            order = np.lexsort((both[:, 1], both[:, 0]))
            both = both[order]
            indices = np.ascontiguousarray(both[:, 1])
            counts = np.bincount(both[:, 0], minlength=n)
        else:
            indices = np.zeros(0, dtype=np.int64)
            counts = np.zeros(n, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])

        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(labels)
            if len(labels) != n:
                raise ValueError("need exactly one label per node")
            if len(set(labels)) != n:
                raise ValueError("labels must be unique")

        self._finish_init(n, indptr, indices, labels)

    def _finish_init(self, n, indptr, indices, labels):
        indptr.setflags(write=False)
        indices.setflags(write=False)
        self.node_count = n
        self.labels = labels
        self._indptr = indptr
        self._indices = indices
        self._degrees = None
        self._owner = None

    @classmethod
    def _from_csr(cls, node_count, indptr, indices, labels):
        g = cls.__new__(cls)
        g._finish_init(node_count, np.asarray(indptr), np.asarray(indices), tuple(labels))
        return g

    def __reduce__(self):
        return (Graph._from_csr, (self.node_count, np.asarray(self._indptr), np.asarray(self._indices), self.labels))

    def __repr__(self):
        return f"Graph(n={self.node_count}, m={self.edge_count})"

    # -- basic accessors ---------------------------------------------------

    @property
    def degrees(self) -> np.ndarray:
        """Degree of every node, as a read-only int array."""
        if self._degrees is None:
            d = np.diff(self._indptr)
            d.setflags(write=False)
            self._degrees = d
        return self._degrees

    @property
    def edge_count(self) -> int:
        return self._indices.size // 2

    def degree(self, v: int) -> int:
        v = self._check_node(v)
        return int(self._indptr[v + 1] - self._indptr[v])

    def max_degree(self) -> int:
        if self.node_count == 0 or self._indices.size == 0:
            return 0
        return int(self.degrees.max())

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor indices of ``v`` (read-only view)."""
        v = self._check_node(v)
        return self._indices[self._indptr[v] : self._indptr[v + 1]]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Iterate edges once each as (u, v) with u < v."""
        for u in range(self.node_count):
            for v in self.neighbors(u):
                if v > u:
                    yield u, int(v)

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        return self._indptr, self._indices

    def _check_node(self, v) -> int:
        v = int(v)
        if not 0 <= v < self.node_count:
            raise IndexError(f"node index {v} out of range for {self.node_count} nodes")
        return v

    # -- bulk neighbor access ------------------------------------------------

    def gather_neighbors(self, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Flattened neighbor lists for several nodes at once.

        Returns ``(flat, owner)`` where ``flat`` concatenates the neighbor
        lists of ``nodes`` in order and ``owner[i]`` is the position within
        ``nodes`` whose list ``flat[i]`` belongs to.
        """
        nodes = np.asarray(nodes, dtype=np.int64)
        counts = self._indptr[nodes + 1] - self._indptr[nodes]
        total = int(counts.sum())
        owner = np.repeat(np.arange(nodes.size, dtype=np.int64), counts)
        if total == 0:
            return self._indices[:0], owner
        starts = self._indptr[nodes]
        before = np.concatenate(([0], np.cumsum(counts)[:-1]))
        pos = np.arange(total, dtype=np.int64) + np.repeat(starts - before, counts)
        return self._indices[pos], owner

    @property
    def owner_index(self) -> np.ndarray:
        """For every CSR slot, the node owning it (lazily built, cached)."""
        if self._owner is None:
            o = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
            o.setflags(write=False)
            self._owner = o
        return self._owner


# -- module-level operations ----------------------------------------------


def degree(g: Graph, v: int) -> int:
    """Number of neighbors of node ``v``."""
    return g.degree(v)


def max_degree(g: Graph) -> int:
    """Largest degree in the graph; 0 for an empty or edgeless graph."""
    return g.max_degree()


def epidemic_threshold(g: Graph) -> float:
    """Epidemic threshold ``<k> / (<k^2> - <k>)`` over all nodes.

    Averages are population means over the full node set, isolated nodes
    included. Raises :class:`ThresholdUndefinedError` when the denominator
    is not positive (all degrees <= 1, or no nodes at all).
    """
    if g.node_count == 0:
        raise ThresholdUndefinedError("threshold undefined: graph has no nodes")
    deg = g.degrees.astype(np.float64)
    k1 = deg.mean()
    k2 = (deg * deg).mean()
    denom = k2 - k1
    if denom <= 0:
        raise ThresholdUndefinedError(
            f"threshold undefined: <k^2> - <k> = {denom:g} is not positive"
        )
    return float(k1 / denom)


def connected_components(g: Graph) -> np.ndarray:
    """Component id per node, ids assigned in order of lowest member index."""
    n = g.node_count
    comp = np.full(n, -1, dtype=np.int64)
    cid = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = cid
        frontier = np.array([s], dtype=np.int64)
        while frontier.size:
            flat, _ = g.gather_neighbors(frontier)
            fresh = flat[comp[flat] < 0]
            if fresh.size == 0:
                break
            frontier = np.unique(fresh)
            comp[frontier] = cid
        cid += 1
    return comp


# -- edge-list text format ---------------------------------------------------


def _read_text(source) -> str:
    if isinstance(source, os.PathLike):
        with open(source, "rb") as fh:
            return fh.read().decode("utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def load_edge_list(source: str | bytes | os.PathLike | IO) -> tuple[Graph, IngestReport]:
    """Parse an edge-list text into a simplified graph plus a drop report.

    The format is one edge per line: two whitespace-separated node tokens.
    Blank lines and lines starting with ``#`` are ignored. ``str``/``bytes``
    arguments are treated as content, path-likes are opened and read.

    Node indices are assigned in first-appearance order. Self-loops and
    repeated edges are dropped and counted. A line with a token count other
    than two raises :class:`EdgeListParseError` naming the line.
    """
    text = _read_text(source)
    label_index: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    self_loops = 0
    duplicates = 0

    def intern(token: str) -> int:
        idx = label_index.get(token)
        if idx is None:
            idx = len(label_index)
            label_index[token] = idx
        return idx

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                line_number, raw, f"expected 2 node tokens, found {len(tokens)}"
            )
        u, v = intern(tokens[0]), intern(tokens[1])
        if u == v:
            self_loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        edges.append(key)

    g = Graph(len(label_index), edges, labels=list(label_index))
    assert int(g.degrees.sum()) == 2 * len(edges), "degree sum must be twice the edge count"
    report = IngestReport(
        edges_kept=len(edges),
        self_loops_dropped=self_loops,
        duplicate_edges_dropped=duplicates,
        isolated_nodes=int((g.degrees == 0).sum()),
    )
    return g, report


def dump_edge_list(g: Graph) -> str:
    """Serialize edges as text, one ``label label`` line per edge.

    The format cannot represent isolated nodes; labels containing whitespace
    or starting with ``#`` would not survive a round trip and are rejected.
    """
    for lab in g.labels:
        if not lab or lab.split() != [lab] or lab.startswith("#"):
            raise ValueError(f"label {lab!r} is not representable in edge-list text")
    lines = [f"{g.labels[u]} {g.labels[v]}" for u, v in g.edges()]
    return "\n".join(lines) + ("\n" if lines else "")
