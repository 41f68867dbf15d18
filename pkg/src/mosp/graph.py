"""Undirected network graphs with vector-valued edge costs.

Every edge carries one non-negative cost per attribute. The default three
attributes model a network link: an additive packet-loss term (see
``loss_to_additive``), latency in milliseconds, and jitter in milliseconds.
This module also covers connected-topology generation, cost sampling from
two-component uniform mixtures, and the graph text file format.
"""

from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphError, GraphFormatError
from .rng import STREAM_COSTS, STREAM_TOPOLOGY, spawn_rng

# Cost vectors are plain tuples of floats, one entry per attribute.
CostVec = tuple[float, ...]

DEFAULT_NUM_ATTRIBUTES = 3
DEFAULT_ATTRIBUTE_NAMES = ("loss_additive", "latency_ms", "jitter_ms")

GRAPH_FILE_HEADER = "mosp-graph v1"


def attribute_names(num_attributes: int) -> tuple[str, ...]:
    """Column names for the given attribute count."""
    if num_attributes == len(DEFAULT_ATTRIBUTE_NAMES):
        return DEFAULT_ATTRIBUTE_NAMES
    return tuple(f"cost_{j + 1}" for j in range(num_attributes))


def validate_cost_vector(values: Sequence[float], num_attributes: int | None = None) -> CostVec:
    """Coerce to a cost tuple, rejecting wrong arity, negative and non-finite entries."""
    vec = tuple(float(v) for v in values)
    if not vec:
        raise GraphError("cost vector must have at least one attribute")
    if num_attributes is not None and len(vec) != num_attributes:
        raise GraphError(f"cost vector has {len(vec)} attributes, expected {num_attributes}")
    for j, v in enumerate(vec):
        if not math.isfinite(v) or v < 0.0:
            raise GraphError(f"cost attribute {j} must be finite and >= 0, got {v!r}")
    return vec


def zero_cost(num_attributes: int) -> CostVec:
    return (0.0,) * num_attributes


def add_costs(a: CostVec, b: CostVec) -> CostVec:
    """Component-wise sum; costs accumulate independently per attribute."""
    return tuple(x + y for x, y in zip(a, b, strict=True))


def loss_to_additive(p: float) -> float:
    """Map a packet-loss probability to its additive form ``-ln(1 - p)``.

    Loss probabilities do not add along a path, but this transform does: the
    value for the combined loss ``1 - (1-p1)(1-p2)`` of two independent links
    equals the sum of the per-link values. Zero loss maps to zero.
    """
    if not 0.0 <= p < 1.0:
        raise GraphError(f"loss probability must satisfy 0 <= p < 1, got {p!r}")
    return -math.log1p(-p)


def additive_to_loss(x: float) -> float:
    """Inverse of :func:`loss_to_additive`, for reporting raw probabilities."""
    if x < 0.0:
        raise GraphError(f"additive loss must be >= 0, got {x!r}")
    return -math.expm1(-x)


@dataclass(frozen=True)
class Edge:
    """Undirected edge between nodes ``u`` and ``v`` with one cost per attribute."""

    u: int
    v: int
    cost: CostVec


class Graph:
    """Immutable undirected graph with per-edge cost vectors.

    Parallel edges are representable, self-loops are not. ``adjacency`` maps
    each node to the ids of its incident edges in ascending id order.
    Connectivity is not enforced here; generators and the file loader check
    it where their contracts require.
    """

    def __init__(
        self,
        node_count: int,
        edges: Iterable[Edge | tuple],
        num_attributes: int | None = None,
    ):
        if node_count < 1:
            raise GraphError(f"node count must be >= 1, got {node_count}")
        self.node_count = int(node_count)

        normalized: list[Edge] = []
        for e in edges:
            if not isinstance(e, Edge):
                u, v, cost = e
                e = Edge(int(u), int(v), validate_cost_vector(cost))
            else:
                e = Edge(int(e.u), int(e.v), validate_cost_vector(e.cost))
            if not (0 <= e.u < node_count and 0 <= e.v < node_count):
                raise GraphError(f"edge ({e.u}, {e.v}) references a node outside [0, {node_count})")
            if e.u == e.v:
                raise GraphError(f"self-loop at node {e.u} is not allowed")
            if e.u > e.v:
                e = Edge(e.v, e.u, e.cost)
            normalized.append(e)

        if normalized:
            inferred = len(normalized[0].cost)
        else:
            inferred = num_attributes if num_attributes is not None else DEFAULT_NUM_ATTRIBUTES
        if num_attributes is not None and inferred != num_attributes:
            raise GraphError(f"edges carry {inferred} attributes, expected {num_attributes}")
        for e in normalized:
            if len(e.cost) != inferred:
                raise GraphError("all edges must carry the same number of cost attributes")
        self.num_attributes = inferred
        self.edges = tuple(normalized)

        adjacency: list[list[int]] = [[] for _ in range(node_count)]
        for idx, e in enumerate(self.edges):
            adjacency[e.u].append(idx)
            adjacency[e.v].append(idx)
        self.adjacency = tuple(tuple(ids) for ids in adjacency)

    def incident_edges(self, node: int) -> tuple[int, ...]:
        if not 0 <= node < self.node_count:
            raise GraphError(f"node {node} outside [0, {self.node_count})")
        return self.adjacency[node]

    def other_end(self, edge_id: int, node: int) -> int:
        e = self.edge(edge_id)
        if node == e.u:
            return e.v
        if node == e.v:
            return e.u
        raise GraphError(f"node {node} is not an endpoint of edge {edge_id}")

    def edge(self, edge_id: int) -> Edge:
        if not 0 <= edge_id < len(self.edges):
            raise GraphError(f"edge id {edge_id} outside [0, {len(self.edges)})")
        return self.edges[edge_id]

    def average_degree(self) -> float:
        return 2.0 * len(self.edges) / self.node_count

    def is_connected(self) -> bool:
        seen = bytearray(self.node_count)
        seen[0] = 1
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for eid in self.adjacency[u]:
                w = self.other_end(eid, u)
                if not seen[w]:
                    seen[w] = 1
                    count += 1
                    stack.append(w)
        return count == self.node_count

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.node_count == other.node_count and self.edges == other.edges

    def __repr__(self) -> str:
        return f"Graph(nodes={self.node_count}, edges={len(self.edges)}, attrs={self.num_attributes})"


@dataclass(frozen=True)
class TopologySpec:
    """Target size for a generated topology.

    ``edge_count`` must fit a connected simple graph: at least ``V - 1`` and
    at most ``V * (V - 1) / 2``.
    """

    node_count: int
    edge_count: int
    seed: int = 0
    name: str = ""

    def __post_init__(self):
        v, e = self.node_count, self.edge_count
        if v < 1:
            raise GraphError(f"node count must be >= 1, got {v}")
        if e < v - 1:
            raise GraphError(f"{e} edges cannot connect {v} nodes (need at least {v - 1})")
        if e > v * (v - 1) // 2:
            raise GraphError(f"{e} edges exceed the simple-graph maximum for {v} nodes")

    @property
    def label(self) -> str:
        return self.name or f"{self.node_count}N{self.edge_count}E"


# Benchmark network classes by name. MCC-30N35E matches the layout of a
# published metro fiber ring.
NAMED_TOPOLOGIES = {
    "25N50E": (25, 50),
    "100N150E": (100, 150),
    "50N50E": (50, 50),
    "MCC-30N35E": (30, 35),
    "MCC": (30, 35),
}

_SIZE_NAME = re.compile(r"^(\d+)N(\d+)E$", re.IGNORECASE)


def parse_topology(text: str, seed: int = 0) -> TopologySpec:
    """Build a :class:`TopologySpec` from a class name or a ``V,E`` pair."""
    key = text.strip()
    upper = key.upper()
    if upper in NAMED_TOPOLOGIES:
        v, e = NAMED_TOPOLOGIES[upper]
        name = "MCC-30N35E" if upper.startswith("MCC") else upper
        return TopologySpec(v, e, seed=seed, name=name)
    m = _SIZE_NAME.match(key)
    if m:
        return TopologySpec(int(m.group(1)), int(m.group(2)), seed=seed)
    if "," in key:
        parts = key.split(",")
        if len(parts) == 2:
            try:
                return TopologySpec(int(parts[0]), int(parts[1]), seed=seed)
            except ValueError:
                pass
    raise GraphError(f"cannot parse topology {text!r}; use a name like 50N50E or a V,E pair")


def _random_tree(node_count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Uniform random labeled tree, decoded from a random Pruefer sequence."""
    n = node_count
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [int(x) for x in rng.integers(0, n, size=n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges: list[tuple[int, int]] = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return edges


def generate_topology(spec: TopologySpec) -> Graph:
    """Generate a connected simple graph with the exact requested size.

    A uniform random spanning tree is drawn first, then the remaining edges
    are sampled uniformly without replacement from the non-tree node pairs.
    Edge costs are zero placeholders until :func:`sample_costs` assigns them.
    The same spec (including seed) always yields the same graph.
    """
    rng = spawn_rng(spec.seed, STREAM_TOPOLOGY)
    n = spec.node_count
    tree = _random_tree(n, rng)
    pairs = list(tree)
    extra = spec.edge_count - len(tree)
    if extra > 0:
        taken = set(tree)
        candidates = [(u, v) for u in range(n) for v in range(u + 1, n) if (u, v) not in taken]
        chosen = rng.choice(len(candidates), size=extra, replace=False)
        pairs.extend(candidates[int(i)] for i in chosen)
    zero = zero_cost(DEFAULT_NUM_ATTRIBUTES)
    return Graph(n, [Edge(u, v, zero) for u, v in pairs])


@dataclass(frozen=True)
class UniformMixture:
    """Two-component uniform mixture over non-negative reals.

    A draw picks component 1 with probability ``weight_1`` and samples
    uniformly from ``[low, high)`` of the chosen component.
    """

    weight_1: float
    low_1: float
    high_1: float
    weight_2: float
    low_2: float
    high_2: float

    def __post_init__(self):
        if self.weight_1 < 0 or self.weight_2 < 0:
            raise GraphError("mixture weights must be >= 0")
        if abs(self.weight_1 + self.weight_2 - 1.0) > 1e-9:
            raise GraphError(f"mixture weights must sum to 1, got {self.weight_1 + self.weight_2}")
        for lo, hi in ((self.low_1, self.high_1), (self.low_2, self.high_2)):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise GraphError("mixture bounds must be finite")
            if lo < 0 or hi < lo:
                raise GraphError(f"mixture bounds must satisfy 0 <= low <= high, got [{lo}, {hi}]")

    def mean(self) -> float:
        return self.weight_1 * (self.low_1 + self.high_1) / 2.0 + self.weight_2 * (self.low_2 + self.high_2) / 2.0

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """One draw (float) or ``size`` draws (ndarray)."""
        if size is None:
            if rng.random() < self.weight_1:
                return float(rng.uniform(self.low_1, self.high_1))
            return float(rng.uniform(self.low_2, self.high_2))
        pick = rng.random(size) < self.weight_1
        first = rng.uniform(self.low_1, self.high_1, size)
        second = rng.uniform(self.low_2, self.high_2, size)
        return np.where(pick, first, second)


@dataclass(frozen=True)
class CostDistribution:
    """Per-attribute sampling model for edge costs.

    The attribute at ``loss_index`` is drawn as a raw loss probability and
    stored in additive form via :func:`loss_to_additive`; the others are
    stored as drawn. ``loss_index=None`` disables the transform.
    """

    attributes: tuple[UniformMixture, ...]
    loss_index: int | None = 0

    def __post_init__(self):
        if not self.attributes:
            raise GraphError("cost distribution needs at least one attribute")
        if self.loss_index is not None:
            if not 0 <= self.loss_index < len(self.attributes):
                raise GraphError(f"loss_index {self.loss_index} outside [0, {len(self.attributes)})")
            mix = self.attributes[self.loss_index]
            for lo, hi in ((mix.low_1, mix.high_1), (mix.low_2, mix.high_2)):
                if hi > 1.0 or lo >= 1.0 or (lo == hi == 1.0):
                    raise GraphError("loss-probability mixture support must stay within [0, 1)")

    @property
    def num_attributes(self) -> int:
        return len(self.attributes)


def default_cost_distribution() -> CostDistribution:
    """Built-in link cost model used by the bundled benchmarks.

    Packet-loss probability, latency (ms) and jitter (ms); each attribute is
    a two-component uniform mixture with ranges measured on 5G campus links.
    """
    return CostDistribution(
        attributes=(
            UniformMixture(1 / 3, 0.0005, 0.1, 2 / 3, 0.0, 0.0005),
            UniformMixture(1 / 3, 5.0, 10.0, 2 / 3, 1.0, 5.0),
            UniformMixture(1 / 3, 3.0, 5.0, 2 / 3, 1.0, 3.0),
        ),
        loss_index=0,
    )


def sample_costs(graph: Graph, dist: CostDistribution, seed: int) -> Graph:
    """Return a copy of ``graph`` with freshly sampled edge costs.

    Attributes are drawn independently per edge, in edge-id order, so a given
    seed always produces identical costs. The loss attribute is converted to
    its additive form before storage.
    """
    rng = spawn_rng(seed, STREAM_COSTS)
    edges = []
    for e in graph.edges:
        values = []
        for j, mix in enumerate(dist.attributes):
            x = mix.sample(rng)
            if j == dist.loss_index:
                x = loss_to_additive(x)
            values.append(x)
        edges.append(Edge(e.u, e.v, tuple(values)))
    return Graph(graph.node_count, edges)


def save_graph(graph: Graph, path: str | Path) -> None:
    """Write the text format read back by :func:`load_graph`.

    Floats are written with ``repr`` so a save/load round trip reproduces the
    graph bit for bit.
    """
    lines = [GRAPH_FILE_HEADER, f"nodes {graph.node_count}"]
    for e in graph.edges:
        cost = " ".join(repr(c) for c in e.cost)
        lines.append(f"{e.u} {e.v} {cost}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_graph(path: str | Path) -> Graph:
    """Parse a graph file.

    Format: a ``mosp-graph v1`` header line, a ``nodes <count>`` line, then
    one edge per line as ``<u> <v> <cost...>`` with one decimal cost per
    attribute. ``#`` starts a comment; blank lines are ignored. Structural
    problems are rejected with the offending line number; a disconnected
    graph is rejected with a file-level diagnostic.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GraphFormatError(f"cannot read {path}: {exc}") from exc

    header_done = False
    node_count: int | None = None
    edges: list[Edge] = []
    num_attributes: int | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_done:
            if line != GRAPH_FILE_HEADER:
                raise GraphFormatError(f"expected header {GRAPH_FILE_HEADER!r}, got {line!r}", lineno)
            header_done = True
            continue
        if node_count is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "nodes":
                raise GraphFormatError(f"expected 'nodes <count>', got {line!r}", lineno)
            try:
                node_count = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"node count {parts[1]!r} is not an integer", lineno) from None
            if node_count < 1:
                raise GraphFormatError(f"node count must be >= 1, got {node_count}", lineno)
            continue
        tokens = line.split()
        if len(tokens) < 3:
            raise GraphFormatError(f"edge line needs '<u> <v> <cost...>', got {line!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
            cost = tuple(float(t) for t in tokens[2:])
        except ValueError:
            raise GraphFormatError(f"cannot parse edge line {line!r}", lineno) from None
        if num_attributes is None:
            num_attributes = len(cost)
        try:
            cost = validate_cost_vector(cost, num_attributes)
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise GraphError(f"edge ({u}, {v}) references a node outside [0, {node_count})")
            if u == v:
                raise GraphError(f"self-loop at node {u} is not allowed")
        except GraphError as exc:
            raise GraphFormatError(str(exc), lineno) from None
        edges.append(Edge(u, v, cost))

    if not header_done:
        raise GraphFormatError("empty file: missing header")
    if node_count is None:
        raise GraphFormatError("missing 'nodes <count>' line")

    graph = Graph(node_count, edges, num_attributes=num_attributes)
    if not graph.is_connected():
        raise GraphFormatError(f"graph in {path} is not connected")
    return graph
