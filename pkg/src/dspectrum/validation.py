"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .graph import Graph

__all__ = ["check_graph", "check_node_index", "check_probability", "check_h_list"]


def check_graph(G) -> Graph:
    """Require a :class:`~dspectrum.graph.Graph`; reject anything else loudly."""
    if not isinstance(G, Graph):
        raise TypeError(
            f"expected a dspectrum Graph, got {type(G).__name__}; "
            "build one with Graph(...) or load_edge_list(...)"
        )
    return G


def check_node_index(g: Graph, v) -> int:
    v = int(v)
    if not 0 <= v < g.node_count:
        raise IndexError(f"node index {v} out of range for {g.node_count} nodes")
    return v


def check_probability(p) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return p


def check_h_list(values: Sequence[float]) -> tuple[float, ...]:
    """Multiplier sweep: non-empty, positive, strictly increasing."""
    hs = tuple(float(h) for h in values)
    if not hs:
        raise ValueError("h list must not be empty")
    arr = np.asarray(hs)
    if arr.min() <= 0:
        raise ValueError("h multipliers must be positive")
    if (np.diff(arr) <= 0).any():
        raise ValueError("h multipliers must be strictly increasing")
    return hs
