"""Independent reference solvers the package is checked against.

Deliberately naive: these share no code or algorithmic structure with the
production solvers, so agreement is meaningful.
"""

from __future__ import annotations

import heapq
from collections import deque


def ford_fulkerson_unit(n: int, edges: list[tuple[int, int, int]], s: int, t: int) -> int:
    """Max flow by augmenting one unit at a time along any BFS path."""
    cap = {}
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for u, v, c in edges:
        cap[(u, v)] = cap.get((u, v), 0) + c
        cap.setdefault((v, u), 0)
        adj[u].add(v)
        adj[v].add(u)
    total = 0
    while True:
        parent = {s: None}
        queue = deque([s])
        while queue and t not in parent:
            u = queue.popleft()
            for v in sorted(adj[u]):
                if v not in parent and cap.get((u, v), 0) > 0:
                    parent[v] = u
                    queue.append(v)
        if t not in parent:
            return total
        v = t
        while parent[v] is not None:
            u = parent[v]
            cap[(u, v)] -= 1
            cap[(v, u)] += 1
            v = u
        total += 1


def feasible_circulation_exists(n: int, edges: list[tuple[int, int, int, int]]) -> bool:
    """Brute force over all integer flow assignments within bounds."""

    def ok(flows):
        balance = [0] * n
        for (u, v, _lo, _hi), f in zip(edges, flows):
            balance[u] -= f
            balance[v] += f
        return all(b == 0 for b in balance)

    def rec(i, flows):
        if i == len(edges):
            return ok(flows)
        _u, _v, lo, hi = edges[i]
        return any(rec(i + 1, flows + [f]) for f in range(lo, hi + 1))

    return rec(0, [])


def min_total_cover_length(n: int, edges: list[tuple[int, int]], source: int) -> int | None:
    """Exhaustive minimum summed length of any edge-covering path suite.

    Dijkstra over (uncovered-edge bitmask, current walk position): walking
    an edge costs 1 and may clear its bit; abandoning the walk and
    starting a new path at the source is free.  None when some edge is
    unreachable.
    """
    m = len(edges)
    out: dict[int, list[tuple[int, int]]] = {}
    for eid, (u, v) in enumerate(edges):
        out.setdefault(u, []).append((eid, v))
    start = ((1 << m) - 1, source)
    dist = {start: 0}
    heap = [(0, start)]
    while heap:
        d, (mask, pos) = heapq.heappop(heap)
        if d > dist[(mask, pos)]:
            continue
        if mask == 0:
            return d
        if pos != source:  # end this path and start another: free
            new = (mask, source)
            if d < dist.get(new, d + 1):
                dist[new] = d
                heapq.heappush(heap, (d, new))
        for eid, nxt in out.get(pos, ()):
            new = (mask & ~(1 << eid), nxt)
            nd = d + 1
            if nd < dist.get(new, nd + 1):
                dist[new] = nd
                heapq.heappush(heap, (nd, new))
    return None
