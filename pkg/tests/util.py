"""Shared builders and comparison helpers for the test suite."""

from __future__ import annotations

from mosp import Graph, TopologySpec, default_cost_distribution, generate_topology, sample_costs
from mosp.rng import derive_seed, spawn_rng


def chain_graph(costs) -> Graph:
    """Path graph 0-1-...-n with the given per-edge cost vectors."""
    return Graph(len(costs) + 1, [(i, i + 1, c) for i, c in enumerate(costs)])


def random_cost_graph(nodes: int, edges: int, seed: int) -> Graph:
    """Connected random graph with default-model costs, fully seeded."""
    spec = TopologySpec(nodes, edges, seed=derive_seed(seed, 0))
    return sample_costs(generate_topology(spec), default_cost_distribution(), seed=derive_seed(seed, 1))


def small_oracle_instance(i: int, base_seed: int = 9000, dense_cap: int = 45):
    """Seeded instance family for exact-search cross-checks.

    Node counts cycle through 4..12. Edge counts are stratified so the family
    contains spanning trees, the densest admissible graphs (complete graphs
    up to the exhaustive enumerator's comfortable range, capped above it),
    and uniformly drawn sizes in between. Returns (graph, src, dst).
    """
    rng = spawn_rng(base_seed, i)
    v = 4 + i % 9
    max_e = min(v * (v - 1) // 2, dense_cap)
    stratum = (i // 9) % 4
    if stratum == 0:
        e = v - 1
    elif stratum == 1:
        e = max_e
    else:
        e = int(rng.integers(v - 1, max_e + 1))
    graph = random_cost_graph(v, e, seed=derive_seed(base_seed, i, 7))
    src = int(rng.integers(v))
    dst = int(rng.integers(v - 1))
    if dst >= src:
        dst += 1
    return graph, src, dst


def random_edge_walk(graph: Graph, steps: int, seed: int):
    """A random edge walk paired with a fixed end node, for update replays."""
    rng = spawn_rng(seed)
    end = int(rng.integers(graph.node_count))
    state = int(rng.integers(graph.node_count))
    walk = []
    for _ in range(steps):
        incident = graph.adjacency[state]
        action = int(incident[int(rng.integers(len(incident)))])
        nxt = graph.other_end(action, state)
        walk.append((state, action, nxt))
        state = nxt if nxt != end else int(rng.integers(graph.node_count))
    return walk, end


def scalar_q_replay(graph: Graph, walk, end: int, alpha: float, attr: int) -> dict:
    """Independent single-attribute Q-routing over a fixed trajectory."""
    q = {(n, e): 0.0 for n in range(graph.node_count) for e in graph.adjacency[n]}
    for state, action, nxt in walk:
        if nxt == end:
            future = 0.0
        else:
            future = min(q[(nxt, e)] for e in graph.adjacency[nxt])
        cost = graph.edges[action].cost[attr]
        q[(state, action)] = (1.0 - alpha) * q[(state, action)] + alpha * (cost + future)
    return q


def assert_same_cost_sets(actual, expected, tol: float = 1e-9) -> None:
    """Same number of vectors and a one-to-one match within tol per component."""
    a = sorted(actual)
    b = sorted(expected)
    assert len(a) == len(b), f"set sizes differ: {len(a)} vs {len(b)}"
    for x, y in zip(a, b):
        assert len(x) == len(y), f"vector arities differ: {x} vs {y}"
        for p, q in zip(x, y):
            assert abs(p - q) <= tol, f"{x} != {y} beyond tol {tol}"
