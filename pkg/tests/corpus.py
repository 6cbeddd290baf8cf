"""Shared test graphs and a brute-force chain oracle.

The oracle grows the maximal chain levelwise straight from the membership
definition using Python sets, with none of the round/threshold machinery of
the production solvers, so agreement between the three routes is meaningful.
"""

from __future__ import annotations

import numpy as np

from dspectrum import Graph

ER_SETTINGS = [(n, p) for n in (20, 50, 200) for p in (0.05, 0.1, 0.3)]


def er_graph(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph(n, list(zip(iu[keep].tolist(), ju[keep].tolist())))


def p3() -> Graph:
    return Graph(3, [(0, 1), (1, 2)], labels=["a", "b", "c"])


def p4() -> Graph:
    return Graph(4, [(0, 1), (1, 2), (2, 3)], labels=["a", "b", "c", "d"])


def k4() -> Graph:
    return Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])


def star() -> Graph:
    # K_{1,3}: node 0 is the center
    return Graph(4, [(0, 1), (0, 2), (0, 3)])


def triangle_pendant() -> Graph:
    # triangle 0-1-2 with pendant node 3 hanging off node 0
    return Graph(4, [(0, 1), (0, 2), (1, 2), (0, 3)])


def single_edge() -> Graph:
    return Graph(2, [(0, 1)])


def edgeless(n: int = 5) -> Graph:
    return Graph(n, [])


def k4_plus_p3() -> Graph:
    # disjoint union: K4 on 0-3, path on 4-6
    edges = [(i, j) for i in range(4) for j in range(i + 1, 4)] + [(4, 5), (5, 6)]
    return Graph(7, edges)


def named_small() -> dict[str, Graph]:
    return {
        "P3": p3(),
        "P4": p4(),
        "K4": k4(),
        "star": star(),
        "triangle+pendant": triangle_pendant(),
    }


def acceptance_corpus() -> list[tuple[str, Graph]]:
    """The 5 named graphs plus 100 random graphs cycling the size/density grid."""
    graphs = list(named_small().items())
    for idx in range(100):
        n, p = ER_SETTINGS[idx % len(ER_SETTINGS)]
        graphs.append((f"er{idx:03d}_n{n}_p{p:g}", er_graph(n, p, seed=1000 + idx)))
    return graphs


# -- definition-level oracle ---------------------------------------------------


def brute_chain_levels(g: Graph, t: int) -> list[set[int]]:
    """Levelwise-greedy maximal chain straight from the membership condition."""
    assert t <= 0
    n = g.node_count
    adj = [set(g.neighbors(v).tolist()) for v in range(n)]
    levels = [set(range(n))]
    i = 1
    while i <= g.max_degree() + 1:
        prev = levels[i - 1]
        if t < 0:
            ref = levels[max(0, i + t)]
            cur = {v for v in prev if len(adj[v] & ref) >= i}
        else:
            cur = set(prev)
            while True:
                drop = {v for v in cur if len(adj[v] & cur) < i}
                if not drop:
                    break
                cur -= drop
        if not cur:
            break
        levels.append(cur)
        i += 1
    return levels


def brute_ranks(g: Graph, t: int) -> np.ndarray:
    ranks = np.zeros(g.node_count, dtype=np.int64)
    for i, level in enumerate(brute_chain_levels(g, t)):
        for v in level:
            ranks[v] = i
    return ranks
