"""Exact Pareto sets of simple paths via multi-objective label setting.

Also provides a brute-force path enumerator used as an independent check on
small graphs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from heapq import heappop, heappush

from .errors import GraphError
from .graph import CostVec, Graph, add_costs, zero_cost
from .pareto import ParetoSet, Route, dominates

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class Label:
    """Cost of reaching ``node`` along one specific path prefix.

    ``pred``/``pred_edge`` chain back to the source for reconstruction;
    ``on_path`` holds the prefix nodes so expansions never close a cycle.
    Evicted labels are flagged dead instead of being dug out of the heap.
    """

    node: int
    cost: CostVec
    pred: "Label | None" = None
    pred_edge: int | None = None
    on_path: frozenset[int] = field(default_factory=frozenset)
    alive: bool = True


def _try_insert(stored: list[Label], label: Label) -> bool:
    """Admit a label at a node unless a stored one dominates or cost-equals it.

    Admission evicts every stored label the newcomer dominates, so each
    node's list stays mutually non-dominated and duplicate cost vectors are
    kept out (first arrival wins).
    """
    for existing in stored:
        if existing.cost == label.cost or dominates(existing.cost, label.cost):
            return False
    keep = []
    for existing in stored:
        if dominates(label.cost, existing.cost):
            existing.alive = False
        else:
            keep.append(existing)
    keep.append(label)
    stored[:] = keep
    return True


def _check_endpoints(graph: Graph, src: int, dst: int) -> None:
    for name, node in (("src", src), ("dst", dst)):
        if not 0 <= node < graph.node_count:
            raise GraphError(f"{name} node {node} outside [0, {graph.node_count})")
    if src == dst:
        raise GraphError("src and dst must differ")


def mda_pareto(graph: Graph, src: int, dst: int) -> ParetoSet:
    """Exact Pareto set of simple ``src``-``dst`` paths.

    Labels are popped in lexicographic cost order from a priority queue; a
    popped label at the destination is complete and is not extended. A label
    is admitted at a node only if no stored label there dominates or equals
    it, and it evicts any stored labels it dominates. Prefix-node tracking
    keeps every enumerated path simple. With non-negative costs this yields
    exactly the non-dominated cost vectors, one representative path each.
    """
    _check_endpoints(graph, src, dst)
    per_node: list[list[Label]] = [[] for _ in range(graph.node_count)]
    heap: list[tuple[CostVec, int, Label]] = []
    counter = 0

    root = Label(src, zero_cost(graph.num_attributes), on_path=frozenset((src,)))
    per_node[src].append(root)
    heappush(heap, (root.cost, counter, root))

    edges = graph.edges
    adjacency = graph.adjacency
    while heap:
        _, _, label = heappop(heap)
        if not label.alive:
            continue
        u = label.node
        if u == dst:
            continue
        for eid in adjacency[u]:
            e = edges[eid]
            w = e.v if u == e.u else e.u
            if w in label.on_path:
                continue
            child = Label(w, add_costs(label.cost, e.cost), label, eid, label.on_path | {w})
            if _try_insert(per_node[w], child):
                counter += 1
                heappush(heap, (child.cost, counter, child))

    result = ParetoSet()
    for label in per_node[dst]:
        nodes = []
        eids = []
        cur: Label | None = label
        while cur is not None:
            nodes.append(cur.node)
            if cur.pred_edge is not None:
                eids.append(cur.pred_edge)
            cur = cur.pred
        route = Route(tuple(reversed(nodes)), tuple(reversed(eids)))
        result.insert(route, label.cost)
    if not result:
        logger.warning("no path from %d to %d: graph is not connected", src, dst)
    return result


def brute_force_pareto(graph: Graph, src: int, dst: int, node_limit: int = 14) -> ParetoSet:
    """Pareto set computed by exhaustive DFS over all simple paths.

    Exponential in the node count; refuses graphs above ``node_limit``.
    Costs accumulate from the source along each path, matching the summation
    order of :func:`mda_pareto`.
    """
    if graph.node_count > node_limit:
        raise GraphError(f"brute force is limited to {node_limit} nodes, got {graph.node_count}")
    _check_endpoints(graph, src, dst)

    neighbors: list[list[tuple[int, int, CostVec]]] = [
        [(eid, graph.other_end(eid, u), graph.edges[eid].cost) for eid in graph.adjacency[u]]
        for u in range(graph.node_count)
    ]
    result = ParetoSet()
    visited = bytearray(graph.node_count)
    visited[src] = 1
    path_nodes = [src]
    path_edges: list[int] = []

    def descend(u: int, cost: CostVec) -> None:
        if u == dst:
            result.insert(Route(tuple(path_nodes), tuple(path_edges)), cost)
            return
        for eid, w, edge_cost in neighbors[u]:
            if visited[w]:
                continue
            visited[w] = 1
            path_nodes.append(w)
            path_edges.append(eid)
            descend(w, add_costs(cost, edge_cost))
            path_edges.pop()
            path_nodes.pop()
            visited[w] = 0

    descend(src, zero_cost(graph.num_attributes))
    if not result:
        logger.warning("no path from %d to %d: graph is not connected", src, dst)
    return result
