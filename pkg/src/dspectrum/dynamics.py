"""Discrete dynamical systems on graphs with fair update schedules.

Every node carries a state from the finite chain ``{0, ..., s_max}`` with
``s_max = max_degree`` (degree-0 nodes and the always-admissible rank 0
need state 0, and no reachable state exceeds the maximum degree). The
t-system local rule is an offset h-index: a node moves to the largest ``k``
such that at least ``k`` of its neighbors hold states at least ``k + t``.
Started from the degree vector, the dynamics converge to the same per-node
ranks that threshold peeling produces for order ``t``, under any fair
schedule, and the fixed point of order ``t - 1`` is a valid warm start for
order ``t``. That warm-start chaining makes the whole spectrum about as
expensive as a single core decomposition.

Rules are monotone, and along degree-started (or warm-started) trajectories
they never raise a state; the engine asserts the latter per step. The rule
is *not* contractive for arbitrary states below the fixed point, so runs
started from such states must opt out via ``enforce_contractive=False``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import IO, Callable, Iterator, Sequence

import numpy as np

from .graph import Graph
from .peeling import DSpectrum

__all__ = [
    "TSystemRule",
    "t_system_rule",
    "UpdateSchedule",
    "make_schedule",
    "ContractivityError",
    "run_to_fixed_point",
    "fixed_point",
    "compute_spectrum_chained",
    "SCHEDULE_KINDS",
]

SCHEDULE_KINDS = ("round-robin", "singleton-cyclic", "random-fair")


class ContractivityError(RuntimeError):
    """An update tried to raise a node's state; carries node and step index."""

    def __init__(self, node: int, step: int):
        self.node = node
        self.step = step
        super().__init__(f"update at step {step} would raise the state of node {node}")


@dataclass(frozen=True)
class TSystemRule:
    """Offset h-index rule: largest k with >= k neighbors at state >= k + t.

    The node's own state is not consulted. ``k = 0`` always qualifies, so
    the output is well defined even for isolated nodes.
    """

    t: int

    def __call__(self, own_state: int, neighbor_states: Sequence[int]) -> int:
        best = 0
        for rank, s in enumerate(sorted(neighbor_states, reverse=True), start=1):
            if s >= rank + self.t:
                best = rank
            else:
                break
        return best


def t_system_rule(t: int) -> TSystemRule:
    """Local rule of the t-system for the given order offset."""
    return TSystemRule(int(t))


LocalRule = Callable[[int, Sequence[int]], int]


# -- schedules ---------------------------------------------------------------


class UpdateSchedule:
    """Infinite fair sequence of update sets ``W_1, W_2, ...``

    Fairness is constructive: every node occurs in each window of
    ``horizon`` consecutive sets. ``subsets()`` returns a fresh infinite
    iterator, so one schedule object can drive many runs.
    """

    def __init__(self, kind: str, node_count: int, seed: int = 0):
        if kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {kind!r}; choose from {SCHEDULE_KINDS}")
        if node_count < 0:
            raise ValueError("node_count must be non-negative")
        self.kind = kind
        self.node_count = int(node_count)
        self.seed = int(seed)
        if kind == "round-robin":
            self.horizon = 1
        elif kind == "singleton-cyclic":
            self.horizon = max(1, self.node_count)
        else:
            self.horizon = max(1, 2 * self.node_count)

    def __repr__(self):
        return f"UpdateSchedule({self.kind!r}, n={self.node_count}, seed={self.seed})"

    def subsets(self) -> Iterator[np.ndarray]:
        n = self.node_count
        if self.kind == "round-robin":
            everyone = np.arange(n, dtype=np.int64)
            return itertools.repeat(everyone)
        if self.kind == "singleton-cyclic":
            singles = [np.array([v], dtype=np.int64) for v in range(n)]
            return itertools.chain.from_iterable(itertools.repeat(singles)) if n else itertools.repeat(np.zeros(0, np.int64))
        return self._random_fair()

    def _random_fair(self) -> Iterator[np.ndarray]:
        rng = np.random.default_rng(self.seed)
        n = self.node_count
        window = self.horizon
        while True:
            draws = rng.random((window, n)) < 0.5
            missing = np.flatnonzero(~draws.any(axis=0))
            if missing.size:
                rows = rng.integers(0, window, size=missing.size)
                draws[rows, missing] = True
            for r in range(window):
                yield np.flatnonzero(draws[r]).astype(np.int64)


def make_schedule(kind: str, node_count: int, seed: int = 0) -> UpdateSchedule:
    """Build a fair schedule over ``node_count`` nodes.

    ``round-robin`` emits the full node set every step, ``singleton-cyclic``
    emits one node at a time in cyclic order, and ``random-fair`` emits
    seeded random subsets with every node forced to appear at least once per
    window of ``2 * node_count`` emissions.
    """
    return UpdateSchedule(kind, node_count, seed)


# -- state handling and rule evaluation ---------------------------------------


def _check_state(g: Graph, x0, s_max: int) -> np.ndarray:
    x = np.asarray(x0, dtype=np.int64).copy()
    if x.shape != (g.node_count,):
        raise ValueError(f"state must have shape ({g.node_count},), got {x.shape}")
    if x.size and (x.min() < 0 or x.max() > s_max):
        raise ValueError(f"states must lie in [0, {s_max}]")
    return x


def _eval_t_rule(g: Graph, t: int, x: np.ndarray, nodes: np.ndarray, s_max: int) -> np.ndarray:
    """Vectorized t-system rule over a node subset, from the snapshot ``x``."""
    flat, owner = g.gather_neighbors(nodes)
    m = nodes.size
    width = s_max + 1
    hist = np.bincount(owner * width + x[flat], minlength=m * width).reshape(m, width)
    suffix = np.zeros((m, width + 1), dtype=np.int64)
    suffix[:, :width] = hist[:, ::-1].cumsum(axis=1)[:, ::-1]
    ks = np.arange(width)
    cols = np.clip(ks + t, 0, width)
    qualifying = suffix[:, cols]
    return (qualifying >= ks).sum(axis=1) - 1


def _eval_rule(g: Graph, rule: LocalRule, x: np.ndarray, nodes: np.ndarray, s_max: int) -> np.ndarray:
    if isinstance(rule, TSystemRule):
        return _eval_t_rule(g, rule.t, x, nodes, s_max)
    return np.array(
        [int(rule(int(x[v]), x[g.neighbors(v)])) for v in nodes], dtype=np.int64
    )


def _trace_line(sink: IO, payload: dict) -> None:
    sink.write(json.dumps(payload, separators=(",", ":")) + "\n")


# -- engines -------------------------------------------------------------------


def run_to_fixed_point(
    g: Graph,
    rule: LocalRule,
    schedule: UpdateSchedule,
    x0,
    *,
    s_max: int | None = None,
    enforce_contractive: bool = True,
    trace: IO | None = None,
    step_budget: int | None = None,
) -> np.ndarray:
    """Drive the system along a fair schedule until the state is stable.

    At each step all scheduled nodes update simultaneously from the previous
    snapshot. A node whose neighborhood has not changed since its last
    evaluation would recompute the same value, so such no-op evaluations are
    skipped; the trajectory is identical to the literal one. The run stops
    at the first state every node has confirmed since the last change.

    Raises :class:`ContractivityError` if an update would raise a state
    while ``enforce_contractive`` is on, and ``RuntimeError`` if the step
    budget (default ``(n * s_max + 2) * horizon``) is exhausted, which is
    impossible for contractive dynamics and guards against bugs.
    """
    n = g.node_count
    if s_max is None:
        s_max = g.max_degree()
    x = _check_state(g, x0, s_max)
    if n == 0:
        return x
    if schedule.node_count != n:
        raise ValueError("schedule was built for a different node count")
    budget = step_budget if step_budget is not None else (n * max(s_max, 1) + 2) * schedule.horizon
    unconfirmed = np.ones(n, dtype=bool)
    step = 0
    for scheduled in schedule.subsets():
        if not unconfirmed.any():
            break
        step += 1
        if step > budget:
            raise RuntimeError(f"no fixed point within {budget} schedule steps")
        todo = scheduled[unconfirmed[scheduled]]
        if todo.size == 0:
            continue
        new = _eval_rule(g, rule, x, todo, s_max)
        raised = new > x[todo]
        if raised.any() and enforce_contractive:
            raise ContractivityError(int(todo[raised][0]), step)
        changed = todo[new != x[todo]]
        changed_values = new[new != x[todo]]
        x[todo] = new
        unconfirmed[todo] = False
        if changed.size:
            flat, _ = g.gather_neighbors(changed)
            unconfirmed[flat] = True
        if trace is not None:
            _trace_line(
                trace,
                {
                    "step": step,
                    "updated": todo.tolist(),
                    "changed": [[int(v), int(s)] for v, s in zip(changed, changed_values)],
                },
            )
    return x


def fixed_point(
    g: Graph,
    t: int,
    x0,
    *,
    enforce_contractive: bool = True,
    trace: IO | None = None,
) -> np.ndarray:
    """Fixed point of the t-system from ``x0`` via a dirty-set worklist.

    Only nodes whose neighborhood changed are re-evaluated; the run ends
    when the worklist empties. This is equivalent to running a fair
    schedule, just without evaluating nodes whose update cannot fire.
    """
    n = g.node_count
    s_max = g.max_degree()
    x = _check_state(g, x0, s_max)
    if n == 0:
        return x
    dirty = np.arange(n, dtype=np.int64)
    budget = n * max(s_max, 1) + 2
    sweep = 0
    while dirty.size:
        sweep += 1
        if sweep > budget:
            raise RuntimeError(f"no fixed point within {budget} worklist sweeps")
        new = _eval_t_rule(g, t, x, dirty, s_max)
        raised = new > x[dirty]
        if raised.any() and enforce_contractive:
            raise ContractivityError(int(dirty[raised][0]), sweep)
        moved = new != x[dirty]
        changed = dirty[moved]
        if trace is not None:
            _trace_line(
                trace,
                {
                    "order": t,
                    "step": sweep,
                    "updated": dirty.tolist(),
                    "changed": [[int(v), int(s)] for v, s in zip(changed, new[moved])],
                },
            )
        x[dirty] = new
        if changed.size == 0:
            break
        flat, _ = g.gather_neighbors(changed)
        dirty = np.unique(flat)
    return x


def compute_spectrum_chained(g: Graph, *, trace: IO | None = None) -> DSpectrum:
    """Whole spectrum by warm-started fixed points.

    The degree vector is already stable for order ``-max_degree``; each
    subsequent order is seeded with the previous fixed point instead of
    restarting from degrees. The result matches
    :func:`dspectrum.peeling.full_spectrum` exactly.
    """
    delta = g.max_degree()
    matrix = np.empty((g.node_count, delta + 1), dtype=np.int64)
    state = g.degrees.astype(np.int64)
    matrix[:, delta] = state
    for t in range(-delta + 1, 1):
        state = fixed_point(g, t, state, trace=trace)
        matrix[:, -t] = state
    return DSpectrum(matrix, delta)
