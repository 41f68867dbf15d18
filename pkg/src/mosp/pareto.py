"""Pareto dominance, route costing, and non-dominated solution sets."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from itertools import pairwise
from pathlib import Path
from typing import Iterator, Sequence

from .errors import GraphError
from .graph import CostVec, Graph, attribute_names, validate_cost_vector

# Absolute per-component tolerance for cost-vector membership checks.
COST_TOL = 1e-9


def dominates(a: CostVec, b: CostVec) -> bool:
    """Strict Pareto dominance: ``a`` is <= everywhere and < somewhere.

    Equal vectors do not dominate each other.
    """
    if len(a) != len(b):
        raise GraphError(f"cost vectors differ in length: {len(a)} vs {len(b)}")
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


@dataclass(frozen=True)
class Route:
    """A node/edge trace through a graph.

    ``edges[i]`` joins ``nodes[i]`` and ``nodes[i+1]``. Routes may revisit
    nodes and edges; simple paths are the special case without repeats.
    """

    nodes: tuple[int, ...]
    edges: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(n) for n in self.nodes))
        object.__setattr__(self, "edges", tuple(int(e) for e in self.edges))
        if not self.nodes:
            raise GraphError("a route needs at least one node")
        if len(self.edges) != len(self.nodes) - 1:
            raise GraphError(f"route with {len(self.nodes)} nodes needs {len(self.nodes) - 1} edges, got {len(self.edges)}")

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    def is_simple(self) -> bool:
        return len(set(self.nodes)) == len(self.nodes)

    def __len__(self) -> int:
        return len(self.edges)


def validate_route(graph: Graph, route: Route) -> None:
    """Check that each recorded edge actually joins its consecutive nodes."""
    for (a, b), eid in zip(pairwise(route.nodes), route.edges):
        e = graph.edge(eid)
        if {a, b} != {e.u, e.v}:
            raise GraphError(f"edge {eid} joins ({e.u}, {e.v}), not ({a}, {b})")


def route_cost(graph: Graph, route: Route) -> CostVec:
    """Component-wise sum of edge costs along the route, in traversal order."""
    total = [0.0] * graph.num_attributes
    for eid in route.edges:
        cost = graph.edge(eid).cost
        for j in range(len(total)):
            total[j] += cost[j]
    return tuple(total)


class ParetoSet:
    """Mutually non-dominated (path, cost) entries.

    The set is canonical by cost vector: a candidate whose cost equals an
    existing entry is rejected, so the first-inserted path stays as the
    representative for that vector.
    """

    def __init__(self):
        self._entries: list[tuple[Route | None, CostVec]] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple[Route | None, CostVec]]:
        return iter(self._entries)

    @property
    def entries(self) -> tuple[tuple[Route | None, CostVec], ...]:
        return tuple(self._entries)

    def costs(self) -> list[CostVec]:
        return [cost for _, cost in self._entries]

    def insert(self, path: Route | None, cost: CostVec) -> bool:
        """Insert a candidate, evicting entries it dominates.

        Returns False and leaves the set unchanged when the candidate is
        dominated by, or cost-equal to, an existing entry.
        """
        cost = validate_cost_vector(cost, len(self._entries[0][1]) if self._entries else None)
        if path is not None and not path.is_simple():
            raise GraphError("pareto entries must be simple paths")
        for _, existing in self._entries:
            if existing == cost or dominates(existing, cost):
                return False
        self._entries = [(p, c) for p, c in self._entries if not dominates(cost, c)]
        self._entries.append((path, cost))
        return True

    def contains_cost(self, cost: Sequence[float], tol: float = COST_TOL) -> bool:
        """True if some entry matches ``cost`` within absolute ``tol`` per component."""
        if tol < 0:
            raise GraphError(f"tolerance must be >= 0, got {tol}")
        cost = tuple(float(c) for c in cost)
        for _, existing in self._entries:
            if len(existing) == len(cost) and all(abs(x - y) <= tol for x, y in zip(existing, cost)):
                return True
        return False


def write_pareto_csv(pareto: ParetoSet, path: str | Path) -> None:
    """Write one row per entry: semicolon-joined path nodes, then the cost columns."""
    if len(pareto):
        names = attribute_names(len(pareto.entries[0][1]))
    else:
        names = attribute_names(3)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path_nodes", *names])
        for route, cost in pareto:
            nodes = ";".join(str(n) for n in route.nodes) if route is not None else ""
            writer.writerow([nodes, *[repr(c) for c in cost]])
