import random

import pytest

from actorcover.flow import (
    BoundedEdge,
    FlowNetwork,
    InfeasibleCirculationError,
    solve_circulation,
)
from oracles import feasible_circulation_exists, ford_fulkerson_unit


def test_single_edge():
    net = FlowNetwork(2)
    net.add_edge(0, 1, 5)
    assert net.max_flow(0, 1) == 5


def test_two_disjoint_paths():
    net = FlowNetwork(6)
    net.add_edge(0, 1, 3)
    net.add_edge(1, 2, 7)
    net.add_edge(2, 5, 3)
    net.add_edge(0, 3, 4)
    net.add_edge(3, 4, 4)
    net.add_edge(4, 5, 9)
    assert net.max_flow(0, 5) == 7


def test_bottleneck_in_middle():
    net = FlowNetwork(4)
    net.add_edge(0, 1, 10)
    net.add_edge(1, 2, 1)
    net.add_edge(2, 3, 10)
    assert net.max_flow(0, 3) == 1


def random_network(rng, n_max=8, cap_max=10):
    n = rng.randint(2, n_max)
    m = rng.randint(1, 2 * n)
    edges = []
    for _ in range(m):
        u, v = rng.randint(0, n - 1), rng.randint(0, n - 1)
        if u != v:
            edges.append((u, v, rng.randint(0, cap_max)))
    return n, edges


def test_max_flow_matches_unit_augmentation_oracle():
    rng = random.Random(4242)
    for trial in range(600):
        n, edges = random_network(rng)
        s, t = 0, n - 1
        net = FlowNetwork(n)
        for u, v, c in edges:
            net.add_edge(u, v, c)
        got = net.max_flow(s, t)
        want = ford_fulkerson_unit(n, edges, s, t)
        assert got == want, f"trial {trial}: {edges}"


def test_min_cost_flow_prefers_cheap_route():
    net = FlowNetwork(4)
    cheap1 = net.add_edge(0, 1, 1, cost=0)
    cheap2 = net.add_edge(1, 3, 1, cost=0)
    net.add_edge(0, 2, 1, cost=5)
    net.add_edge(2, 3, 1, cost=5)
    flow, cost = net.min_cost_max_flow(0, 3)
    assert flow == 2 and cost == 10
    assert net.flow_of(cheap1) == 1 and net.flow_of(cheap2) == 1


def test_min_cost_flow_value_equals_max_flow():
    rng = random.Random(99)
    for _ in range(200):
        n, edges = random_network(rng)
        plain = FlowNetwork(n)
        costed = FlowNetwork(n)
        for u, v, c in edges:
            plain.add_edge(u, v, c)
            costed.add_edge(u, v, c, cost=rng.randint(0, 3))
        flow, _cost = costed.min_cost_max_flow(0, n - 1)
        assert flow == plain.max_flow(0, n - 1)


def test_negative_costs_rejected():
    net = FlowNetwork(2)
    net.add_edge(0, 1, 1, cost=-1)
    with pytest.raises(ValueError):
        net.min_cost_max_flow(0, 1)


def test_forced_two_cycle_circulation():
    edges = [BoundedEdge(0, 1, 1, 5), BoundedEdge(1, 0, 1, 5)]
    assert solve_circulation(2, edges) == [1, 1]


def test_self_loop_without_lower_bound_stays_empty():
    edges = [BoundedEdge(0, 0, 0, 3)]
    assert solve_circulation(1, edges) == [0]


def test_infeasible_lower_bounds_detected():
    # One unit must leave vertex 1 but nothing may enter it.
    edges = [BoundedEdge(1, 0, 1, 1), BoundedEdge(0, 1, 0, 0)]
    with pytest.raises(InfeasibleCirculationError):
        solve_circulation(2, edges)


def _check_circulation(n, bounded, flows):
    balance = [0] * n
    for e, f in zip(bounded, flows):
        assert e.lower <= f <= e.cap
        balance[e.source] -= f
        balance[e.destination] += f
    assert all(b == 0 for b in balance)


def test_circulation_against_exhaustive_feasibility_oracle():
    rng = random.Random(7)
    agree = 0
    for _ in range(120):
        n = rng.randint(2, 6)
        m = rng.randint(1, 7)
        raw = []
        for _ in range(m):
            u, v = rng.randint(0, n - 1), rng.randint(0, n - 1)
            lo = rng.randint(0, 2)
            hi = lo + rng.randint(0, 2)
            raw.append((u, v, lo, hi))
        oracle = feasible_circulation_exists(n, raw)
        bounded = [BoundedEdge(u, v, lo, hi) for u, v, lo, hi in raw]
        try:
            flows = solve_circulation(n, bounded)
        except InfeasibleCirculationError:
            assert not oracle
            continue
        assert oracle
        _check_circulation(n, bounded, flows)
        agree += 1
    assert agree > 20  # both feasible and infeasible cases were exercised


def test_min_cost_circulation_is_cheaper_or_equal():
    rng = random.Random(13)
    for _ in range(80):
        n = rng.randint(2, 6)
        m = rng.randint(2, 8)
        bounded = []
        for _ in range(m):
            u, v = rng.randint(0, n - 1), rng.randint(0, n - 1)
            lo = rng.randint(0, 1)
            bounded.append(BoundedEdge(u, v, lo, lo + rng.randint(1, 3), rng.randint(0, 2)))
        try:
            cheap = solve_circulation(n, bounded, minimize_cost=True)
        except InfeasibleCirculationError:
            continue
        plain = solve_circulation(n, bounded, minimize_cost=False)
        _check_circulation(n, bounded, cheap)
        _check_circulation(n, bounded, plain)
        cost = sum(e.cost * f for e, f in zip(bounded, cheap))
        cost_plain = sum(e.cost * f for e, f in zip(bounded, plain))
        assert cost <= cost_plain
