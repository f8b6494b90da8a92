"""Edge-covering path suites over single-source directed multigraphs.

Given a graph whose every vertex is reachable from vertex 1, produce a set
of root-anchored paths that together traverse every edge at least once:

``baseline_suite``
    one path per edge (BFS tree prefix + the edge); total length is at
    most (D + 1) * |E| where D is the source diameter.
``flow_suite``
    add a zero-lower-bound return edge from every vertex back to the
    source, require one unit on every original edge, solve the resulting
    circulation with a max-flow solver, duplicate edges by their flow and
    split the Eulerian circuit at return edges.
``min_suite``
    the same reduction solved as a minimum-cost circulation (original
    edges cost 1, return edges cost 0), which makes the summed path
    length minimal among all edge-covering suites.

Vertices are 1-based with source 1; edges are identified by their 0-based
position in the input list.  All tie-breaking is by ascending edge id, so
each generator is a deterministic function of the input graph.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .flow import BoundedEdge, solve_circulation


class UnreachableVertexError(Exception):
    """Some vertex is not reachable from the source; the graph is malformed."""


class MalformedPathError(Exception):
    """A path does not start at the source or does not chain edge-to-edge."""


class UnbalancedDegreeError(Exception):
    """Euler input has a vertex with in-degree != out-degree."""


@dataclass
class CoverGraph:
    """Directed multigraph with vertices 1..n and source 1.

    Parallel edges and self-loops are allowed; ``edges[k]`` is the
    (source, destination) pair of edge id k.
    """

    n: int
    edges: list[tuple[int, int]]
    source: int = 1

    def out_edge_ids(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.n + 1)]
        for eid, (u, _v) in enumerate(self.edges):
            out[u].append(eid)
        return out

    def distances(self) -> list[int]:
        """BFS distance from the source per vertex; -1 marks unreachable."""
        out = self.out_edge_ids()
        dist = [-1] * (self.n + 1)
        dist[self.source] = 0
        frontier = [self.source]
        while frontier:
            nxt = []
            for u in frontier:
                for eid in out[u]:
                    v = self.edges[eid][1]
                    if dist[v] < 0:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        return dist


@dataclass
class TestSuite:
    """Ordered list of paths, each an edge-id sequence starting at the source."""

    __test__ = False  # not a pytest class, despite the name

    paths: list[list[int]] = field(default_factory=list)

    @property
    def path_count(self) -> int:
        return len(self.paths)

    @property
    def total_length(self) -> int:
        return sum(len(p) for p in self.paths)


@dataclass
class CoverageReport:
    hits: list[int]
    uncovered: list[int]
    path_count: int
    total_length: int
    length_bound: int

    @property
    def ok(self) -> bool:
        return not self.uncovered

    @property
    def within_bound(self) -> bool:
        return self.total_length <= self.length_bound


def diameter(graph: CoverGraph) -> int:
    """Maximum BFS distance from the source to any vertex."""
    dist = graph.distances()
    unreachable = [v for v in range(1, graph.n + 1) if dist[v] < 0]
    if unreachable:
        raise UnreachableVertexError(f"vertices unreachable from source: {unreachable}")
    return max(dist[1:]) if graph.n else 0


def _bfs_tree(graph: CoverGraph) -> list[int]:
    """Parent edge id per vertex (-1 at the source), ascending-id tie-break."""
    out = graph.out_edge_ids()
    parent = [-2] * (graph.n + 1)
    parent[graph.source] = -1
    frontier = [graph.source]
    while frontier:
        nxt = []
        for u in frontier:
            for eid in out[u]:
                v = graph.edges[eid][1]
                if parent[v] == -2:
                    parent[v] = eid
                    nxt.append(v)
        frontier = nxt
    missing = [v for v in range(1, graph.n + 1) if parent[v] == -2]
    if missing:
        raise UnreachableVertexError(f"vertices unreachable from source: {missing}")
    return parent


def baseline_suite(graph: CoverGraph) -> TestSuite:
    """One path per edge: the BFS-tree path to its source plus the edge."""
    parent = _bfs_tree(graph)
    tree_paths: dict[int, list[int]] = {graph.source: []}

    def tree_path(v: int) -> list[int]:
        if v not in tree_paths:
            eid = parent[v]
            tree_paths[v] = tree_path(graph.edges[eid][0]) + [eid]
        return tree_paths[v]

    paths = [tree_path(u) + [eid] for eid, (u, _v) in enumerate(graph.edges)]
    return TestSuite(paths)


def euler_circuit(n: int, edges: list[tuple[int, int]], start: int) -> list[int]:
    """Edge-id circuit from ``start`` using every edge exactly once.

    Hierholzer's construction; requires in-degree == out-degree everywhere
    and all edges reachable from ``start``.  Ties break by ascending id.
    """
    out: list[list[int]] = [[] for _ in range(n + 1)]
    degree = [0] * (n + 1)
    for eid, (u, v) in enumerate(edges):
        out[u].append(eid)
        degree[u] += 1
        degree[v] -= 1
    bad = [v for v in range(1, n + 1) if degree[v] != 0]
    if bad:
        raise UnbalancedDegreeError(f"in-degree != out-degree at vertices {bad}")
    for eids in out:
        eids.reverse()  # pop() then yields ascending edge ids

    circuit: list[int] = []
    stack_v = [start]
    stack_e: list[int] = []
    while stack_v:
        u = stack_v[-1]
        if out[u]:
            eid = out[u].pop()
            stack_v.append(edges[eid][1])
            stack_e.append(eid)
        else:
            stack_v.pop()
            if stack_e:
                circuit.append(stack_e.pop())
    circuit.reverse()
    if len(circuit) != len(edges):
        raise UnreachableVertexError("some edges are not reachable from the start vertex")
    return circuit


def _circulation_suite(graph: CoverGraph, minimize_cost: bool) -> TestSuite:
    dist = graph.distances()
    unreachable = [v for v in range(1, graph.n + 1) if dist[v] < 0]
    if unreachable:
        raise UnreachableVertexError(f"vertices unreachable from source: {unreachable}")
    m = len(graph.edges)
    if m == 0:
        return TestSuite([])
    cap = m + 1  # finite stand-in for unbounded capacity; m units always suffice
    bounded = [BoundedEdge(u - 1, v - 1, 1, cap, 1) for u, v in graph.edges]
    for v in range(1, graph.n + 1):
        bounded.append(BoundedEdge(v - 1, graph.source - 1, 0, cap, 0))
    flows = solve_circulation(graph.n, bounded, minimize_cost=minimize_cost)

    # Duplicate each edge by its flow; return edges get ids >= m.
    multi_edges: list[tuple[int, int]] = []
    labels: list[int] = []
    for eid in range(m):
        for _ in range(flows[eid]):
            multi_edges.append(graph.edges[eid])
            labels.append(eid)
    for k in range(m, len(bounded)):
        e = bounded[k]
        for _ in range(flows[k]):
            multi_edges.append((e.source + 1, e.destination + 1))
            labels.append(-1)  # return edge marker

    circuit = euler_circuit(graph.n, multi_edges, graph.source)
    paths: list[list[int]] = []
    current: list[int] = []
    for instance in circuit:
        label = labels[instance]
        if label < 0:
            if current:
                paths.append(current)
                current = []
        else:
            current.append(label)
    if current:
        # The circuit ends back at the source; a trailing segment can only
        # exist when the last traversed edge is an original edge into s.
        paths.append(current)
    return TestSuite(paths)


def flow_suite(graph: CoverGraph) -> TestSuite:
    """Edge-covering suite from any feasible unit-lower-bound circulation."""
    return _circulation_suite(graph, minimize_cost=False)


def min_suite(graph: CoverGraph) -> TestSuite:
    """Edge-covering suite of minimum total length."""
    return _circulation_suite(graph, minimize_cost=True)


def verify_coverage(graph: CoverGraph, suite: TestSuite) -> CoverageReport:
    """Check path validity and report per-edge coverage.

    Raises MalformedPathError when a path does not start at the source or
    does not chain head-to-tail.
    """
    hits = [0] * len(graph.edges)
    for pid, path in enumerate(suite.paths):
        position = graph.source
        for eid in path:
            if not 0 <= eid < len(graph.edges):
                raise MalformedPathError(f"path {pid}: no such edge id {eid}")
            u, v = graph.edges[eid]
            if u != position:
                raise MalformedPathError(
                    f"path {pid}: edge {eid} departs {u}, expected {position}"
                )
            hits[eid] += 1
            position = v
    uncovered = [eid for eid, c in enumerate(hits) if c == 0]
    bound = (diameter(graph) + 1) * len(graph.edges)
    return CoverageReport(hits, uncovered, suite.path_count, suite.total_length, bound)


def random_cover_graph(rng: random.Random, max_vertices: int, max_edges: int) -> CoverGraph:
    """Random single-source multigraph; reachability holds by construction.

    Each vertex beyond the source first gets an edge from an
    already-reachable vertex, then extra edges (parallels and self-loops
    included) are sprinkled up to the edge budget.
    """
    n = rng.randint(1, max_vertices)
    edges: list[tuple[int, int]] = []
    for v in range(2, n + 1):
        edges.append((rng.randint(1, v - 1), v))
    extra = rng.randint(0, max(0, max_edges - len(edges)))
    for _ in range(extra):
        edges.append((rng.randint(1, n), rng.randint(1, n)))
    rng.shuffle(edges)
    # A shuffle may place a vertex's first incoming edge after edges that
    # leave it; reachability is unaffected (edge order is only an id order).
    return CoverGraph(n, edges)
