"""Multi-objective Q-routing.

A tabular agent walks the graph from a start node toward an end node,
keeping one Q-value per cost attribute for every (node, incident edge)
pair. Actions are chosen by pairwise dominance scoring with epsilon-greedy
exploration, and a per-attribute memory retains the best complete route
seen so far together with the Q-table that produced it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GraphError, MospError
from .graph import CostVec, Graph, attribute_names
from .pareto import Route, route_cost
from .rng import STREAM_EXPLORE, spawn_rng


class QTable:
    """Per (node, incident edge) vectors of Q-values, one entry per attribute.

    Keys exist exactly for each node and each of its incident edges; an
    undirected edge therefore appears under both endpoints, learned
    independently per traversal direction.
    """

    def __init__(self, values: dict[tuple[int, int], list[float]], num_attributes: int):
        self._values = values
        self.num_attributes = num_attributes

    @classmethod
    def zeros(cls, graph: Graph) -> "QTable":
        values = {
            (node, eid): [0.0] * graph.num_attributes
            for node in range(graph.node_count)
            for eid in graph.adjacency[node]
        }
        return cls(values, graph.num_attributes)

    def values(self, node: int, edge_id: int) -> list[float]:
        """The live Q-vector for (node, edge_id); mutating it updates the table."""
        try:
            return self._values[(node, edge_id)]
        except KeyError:
            raise GraphError(f"no Q entry for node {node}, edge {edge_id}") from None

    def clone(self) -> "QTable":
        return QTable({k: list(v) for k, v in self._values.items()}, self.num_attributes)

    def items(self):
        return self._values.items()

    def __len__(self) -> int:
        return len(self._values)


@dataclass(frozen=True)
class QRMOConfig:
    """Learner hyperparameters.

    There is no discount: future costs enter the update at full weight, so
    Q-values estimate raw remaining path cost. ``max_steps=None`` falls back
    to ``50 * node_count`` at run time.
    """

    alpha: float = 0.7
    epsilon: float = 0.1
    episodes: int = 100
    max_steps: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise GraphError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise GraphError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.episodes < 0:
            raise GraphError(f"episodes must be >= 0, got {self.episodes}")
        if self.max_steps is not None and self.max_steps < 1:
            raise GraphError(f"max_steps must be >= 1, got {self.max_steps}")


def action_candidates(graph: Graph, state: int, incoming: int | None) -> list[int]:
    """Incident edges of ``state`` minus the incoming edge, ascending by id.

    At a dead end the incoming edge is re-admitted so the walk can backtrack
    instead of stalling.
    """
    candidates = [eid for eid in graph.incident_edges(state) if eid != incoming]
    if not candidates:
        if incoming is None:
            raise GraphError(f"node {state} has no incident edges")
        candidates = [incoming]
    return candidates


def dominance_selection(graph: Graph, q: QTable, state: int, incoming: int | None = None) -> int:
    """Pick the candidate edge with the highest pairwise dominance score.

    Every unordered candidate pair contributes one point per attribute: the
    edge with the smaller Q-value gets it, ties crediting the lower edge id.
    Score ties also resolve to the lowest edge id, so the choice is
    deterministic given the table.
    """
    candidates = action_candidates(graph, state, incoming)
    scores = dict.fromkeys(candidates, 0)
    for i, ax in enumerate(candidates):
        qx = q.values(state, ax)
        for ay in candidates[i + 1:]:
            qy = q.values(state, ay)
            for j in range(len(qx)):
                if qx[j] <= qy[j]:
                    scores[ax] += 1
                else:
                    scores[ay] += 1
    return max(candidates, key=lambda eid: (scores[eid], -eid))


def update_q(
    q: QTable,
    graph: Graph,
    state: int,
    action: int,
    edge_cost: CostVec,
    next_state: int,
    end_node: int,
    alpha: float,
) -> None:
    """Blend the observed edge cost and cheapest continuation into Q, in place.

    The continuation term at ``next_state`` is the per-attribute minimum over
    all of its incident edges (the edge just traversed included), and zero
    when ``next_state`` is the end node. Attributes update independently.
    """
    values = q.values(state, action)
    if next_state == end_node:
        future = [0.0] * len(values)
    else:
        incident = graph.incident_edges(next_state)
        future = [min(q.values(next_state, eid)[j] for eid in incident) for j in range(len(values))]
    for j in range(len(values)):
        values[j] = (1.0 - alpha) * values[j] + alpha * (edge_cost[j] + future[j])


@dataclass
class BestSlot:
    """Best route found for one attribute, with the table that produced it."""

    route: Route
    cost: CostVec
    q_snapshot: QTable
    episode: int


class BestMemory:
    """One slot per attribute holding the cheapest complete route seen so far.

    Unfilled slots behave as infinite cost, so the first complete route
    claims every slot at once.
    """

    def __init__(self, num_attributes: int):
        if num_attributes < 1:
            raise GraphError(f"need at least one attribute, got {num_attributes}")
        self.slots: list[BestSlot | None] = [None] * num_attributes

    @property
    def num_attributes(self) -> int:
        return len(self.slots)

    def best_component(self, j: int) -> float:
        slot = self.slots[j]
        return slot.cost[j] if slot is not None else float("inf")

    def is_filled(self) -> bool:
        return all(slot is not None for slot in self.slots)

    def cost_snapshot(self) -> tuple[CostVec, ...] | None:
        """Current slot costs, or None while any slot is still empty."""
        if not self.is_filled():
            return None
        return tuple(slot.cost for slot in self.slots)


def update_best_path(memory: BestMemory, graph: Graph, route: Route, q: QTable, episode: int) -> None:
    """Claim every slot whose attribute the new route strictly improves.

    Slots updated in the same episode share one Q-table snapshot. Ties keep
    the incumbent.
    """
    cost = route_cost(graph, route)
    snapshot: QTable | None = None
    for j in range(memory.num_attributes):
        if cost[j] < memory.best_component(j):
            if snapshot is None:
                snapshot = q.clone()
            memory.slots[j] = BestSlot(route, cost, snapshot, episode)


def run_episode(
    graph: Graph,
    q: QTable,
    src: int,
    dst: int,
    config: QRMOConfig,
    rng: np.random.Generator,
) -> tuple[Route, bool]:
    """Walk from ``src`` until ``dst`` or the step limit; Q updates every step.

    Each step first draws u ~ U(0,1): u < epsilon explores uniformly over the
    candidate edges, otherwise dominance selection exploits. Returns the
    traversed route and whether it was truncated by the step limit.
    """
    max_steps = config.max_steps if config.max_steps is not None else 50 * graph.node_count
    nodes = [src]
    edge_ids: list[int] = []
    state = src
    incoming: int | None = None
    while state != dst and len(edge_ids) < max_steps:
        if rng.random() < config.epsilon:
            candidates = action_candidates(graph, state, incoming)
            action = candidates[int(rng.integers(len(candidates)))]
        else:
            action = dominance_selection(graph, q, state, incoming)
        next_state = graph.other_end(action, state)
        update_q(q, graph, state, action, graph.edges[action].cost, next_state, dst, config.alpha)
        nodes.append(next_state)
        edge_ids.append(action)
        state = next_state
        incoming = action
    return Route(tuple(nodes), tuple(edge_ids)), state != dst


def qrmo_run(
    graph: Graph,
    src: int,
    dst: int,
    config: QRMOConfig,
) -> tuple[BestMemory, list[tuple[CostVec, ...] | None], QTable]:
    """Run the full episode loop from a zero-initialized table.

    Returns the best-route memory, a per-episode trace of its cost snapshots
    (None until the first complete route), and the final Q-table. Truncated
    episodes still update Q but never enter the memory.
    """
    if src == dst:
        raise GraphError("src and dst must differ")
    graph.incident_edges(src)
    graph.incident_edges(dst)
    q = QTable.zeros(graph)
    memory = BestMemory(graph.num_attributes)
    rng = spawn_rng(config.seed, STREAM_EXPLORE)
    trace: list[tuple[CostVec, ...] | None] = []
    for episode in range(1, config.episodes + 1):
        route, truncated = run_episode(graph, q, src, dst, config, rng)
        if not truncated:
            update_best_path(memory, graph, route, q, episode)
        trace.append(memory.cost_snapshot())
    return memory, trace, q


def extract_solutions(memory: BestMemory) -> list[tuple[Route, CostVec]]:
    """The stored route and cost per slot, duplicates included.

    One route may occupy several slots; callers that need distinct vectors
    must deduplicate themselves.
    """
    if not memory.is_filled():
        raise MospError("no solution found: no episode reached the end node")
    return [(slot.route, slot.cost) for slot in memory.slots]


_Q_COLUMNS = {"loss_additive": "q_loss", "latency_ms": "q_latency", "jitter_ms": "q_jitter"}


def write_qtable_csv(q: QTable, path: str | Path) -> None:
    """Dump the table for debugging, one row per (node, edge) sorted by key."""
    names = [_Q_COLUMNS.get(n, f"q_{n}") for n in attribute_names(q.num_attributes)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["state", "edge", *names])
        for (node, eid), values in sorted(q.items()):
            writer.writerow([node, eid, *[repr(v) for v in values]])
