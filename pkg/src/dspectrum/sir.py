"""Discrete-time SIR Monte Carlo with one-step infectiousness.

Updating is synchronous and generation based: every currently infectious
node gets exactly one independent chance at each of its susceptible
neighbors, all attempts of a step read the pre-step state, and the whole
infectious generation recovers afterwards (recovery probability is fixed at
1). Under these dynamics transmission probability 1 is plain connected
component percolation and probability 0 infects nobody beyond the source,
which the implementation exploits as exact deterministic shortcuts.

Randomness comes from counter-based Philox streams: :func:`simulate_once`
takes a per-run stream keyed ``(seed, source, h_index, run)``, while
:func:`infection_rate` draws all runs of one (source, h) cell from a single
stream keyed ``(seed, source, h_index)`` and simulates them as one batch.
Either way results are bit-identical no matter how work is scheduled or how
many worker processes execute it.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import Graph, epidemic_threshold
from .validation import check_h_list, check_node_index, check_probability

__all__ = [
    "RECOVERY_PROB",
    "DEFAULT_H_LIST",
    "SirParams",
    "InfectionProfile",
    "simulate_once",
    "infection_rate",
    "profile_all_nodes",
]

log = logging.getLogger(__name__)

RECOVERY_PROB = 1.0  # infectious for exactly one step, by model definition
DEFAULT_H_LIST = (0.1, 0.5, 1.0, 1.5, 2.0, 4.0, 6.0, 8.0, 10.0)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SirParams:
    """Simulation knobs: per-attempt probability, replication count, seed."""

    transmission_prob: float = 0.5
    runs_per_source: int = 1000
    seed: int = 0

    def __post_init__(self):
        check_probability(self.transmission_prob)
        if self.runs_per_source < 1:
            raise ValueError("runs_per_source must be at least 1")


@dataclass(frozen=True)
class InfectionProfile:
    """Mean infection rates of one source node across the multiplier sweep."""

    node: int
    rates: np.ndarray
    beta: float

    def __post_init__(self):
        self.rates.setflags(write=False)


def _check_key_parts(source: int, h_index: int, run: int = 0) -> None:
    if not 0 <= source < (1 << 23):
        raise ValueError("source index exceeds the stream key budget")
    if not 0 <= h_index < (1 << 8):
        raise ValueError("h index exceeds the stream key budget")
    if not 0 <= run < (1 << 32):
        raise ValueError("run index exceeds the stream key budget")


def _stream(seed: int, source: int, h_index: int, run: int) -> np.random.Generator:
    """Independent counter-based stream for one simulation run."""
    _check_key_parts(source, h_index, run)
    word0 = np.uint64(seed & _MASK64)
    word1 = np.uint64((source << 40) | (h_index << 32) | run)
    return np.random.Generator(np.random.Philox(key=np.array([word0, word1], dtype=np.uint64)))


def _batch_stream(seed: int, source: int, h_index: int) -> np.random.Generator:
    """Counter-based stream for one whole (source, h) batch of runs.

    Tagged in the top key bit so it can never collide with a per-run stream.
    """
    _check_key_parts(source, h_index)
    word0 = np.uint64(seed & _MASK64)
    word1 = np.uint64((1 << 63) | (source << 40) | (h_index << 32))
    return np.random.Generator(np.random.Philox(key=np.array([word0, word1], dtype=np.uint64)))


def simulate_once(g: Graph, source: int, p: float, rng: np.random.Generator | None) -> int:
    """One epidemic from ``source``; returns the final recovered count.

    ``rng`` may be None only for the deterministic probabilities 0 and 1.
    """
    source = check_node_index(g, source)
    p = check_probability(p)
    if p <= 0.0:
        return 1
    deterministic = p >= 1.0
    if rng is None and not deterministic:
        raise ValueError("an rng stream is required for 0 < p < 1")
    status = np.zeros(g.node_count, dtype=np.uint8)  # 0=S 1=I 2=R
    status[source] = 1
    frontier = np.array([source], dtype=np.int64)
    recovered = 0
    while frontier.size:
        flat, _ = g.gather_neighbors(frontier)
        status[frontier] = 2
        recovered += frontier.size
        attempts = flat[status[flat] == 0]  # one slot per (infector, neighbor) pair
        if attempts.size == 0:
            break
        if deterministic:
            hits = attempts
        else:
            hits = attempts[rng.random(attempts.size) < p]
        frontier = np.unique(hits)
        status[frontier] = 1
    return recovered


def _simulate_batch(g: Graph, source: int, p: float, runs: int, rng: np.random.Generator) -> int:
    """Total recovered over ``runs`` independent epidemics, one flat state array.

    All runs march through their generations together; per-(run, target)
    attempts are drawn in a fixed order from the single stream, so the sum
    is a pure function of (stream, graph, source, p, runs).
    """
    n = g.node_count
    indptr, indices = g.csr()
    status = np.zeros(runs * n, dtype=np.uint8)  # 0=S 1=I 2=R, flattened (run, node)
    offsets = np.arange(runs, dtype=np.int64) * n
    frontier_keys = offsets + source
    status[frontier_keys] = 1
    recovered = 0
    while frontier_keys.size:
        status[frontier_keys] = 2
        recovered += frontier_keys.size
        nodes = frontier_keys % n
        counts = indptr[nodes + 1] - indptr[nodes]
        total = int(counts.sum())
        if total == 0:
            break
        starts = indptr[nodes]
        before = np.concatenate(([0], np.cumsum(counts)[:-1]))
        pos = np.arange(total, dtype=np.int64) + np.repeat(starts - before, counts)
        target_keys = np.repeat(frontier_keys - nodes, counts) + indices[pos]
        target_keys = target_keys[status[target_keys] == 0]
        if target_keys.size == 0:
            break
        draws = rng.random(target_keys.size, dtype=np.float32)
        hits = target_keys[draws < np.float32(p)]
        frontier_keys = np.unique(hits)
        status[frontier_keys] = 1
    return recovered


def infection_rate(g: Graph, source: int, p: float, params: SirParams, h_index: int = 0) -> float:
    """Mean of (recovered count / node count) over ``runs_per_source`` runs.

    ``h_index`` selects the stream family; :func:`profile_all_nodes` passes
    the position of the probability in its sweep. Exact at p = 0 and p = 1.
    """
    source = check_node_index(g, source)
    p = check_probability(p)
    n = g.node_count
    if p <= 0.0:
        return 1.0 / n
    if p >= 1.0:
        return simulate_once(g, source, 1.0, None) / n
    total = _simulate_batch(
        g, source, p, params.runs_per_source, _batch_stream(params.seed, source, h_index)
    )
    return total / (params.runs_per_source * n)


def _profile_row(g: Graph, ps: tuple[float, ...], params: SirParams, source: int) -> np.ndarray:
    return np.array(
        [infection_rate(g, source, p, params, h_index=j) for j, p in enumerate(ps)],
        dtype=np.float64,
    )


_POOL_STATE: dict = {}


def _pool_init(g, ps, params):
    _POOL_STATE["args"] = (g, ps, params)


def _pool_row(source: int) -> np.ndarray:
    g, ps, params = _POOL_STATE["args"]
    return _profile_row(g, ps, params, source)


def profile_all_nodes(
    g: Graph,
    h_list=DEFAULT_H_LIST,
    params: SirParams = SirParams(),
    workers: int = 1,
) -> list[InfectionProfile]:
    """Infection-rate profile of every node across the multiplier sweep.

    Probabilities are ``h * beta`` with ``beta`` the epidemic threshold;
    products above 1 are clamped to 1 with a logged warning. Output is a
    deterministic function of (seed, graph, h_list, runs_per_source),
    independent of ``workers``.
    """
    hs = check_h_list(h_list)
    beta = epidemic_threshold(g)
    ps = []
    for h in hs:
        p = h * beta
        if p > 1.0:
            log.warning("transmission probability %g*beta = %g clamped to 1", h, p)
            p = 1.0
        ps.append(p)
    ps = tuple(ps)

    n = g.node_count
    if workers <= 1 or n <= 1:
        rows = [_profile_row(g, ps, params, v) for v in range(n)]
    else:
        chunk = max(1, -(-n // (workers * 4)))
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_pool_init, initargs=(g, ps, params)
        ) as pool:
            rows = list(pool.map(_pool_row, range(n), chunksize=chunk))
    return [InfectionProfile(v, rows[v], beta) for v in range(n)]
