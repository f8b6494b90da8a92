import pytest

from actorcover.explore import explore
from actorcover.suitefile import read_suite_file, write_suite_file
from actorcover.systems.kv import KvBounds, KvModel, make_emulator as kv_emulator
from actorcover.systems.vr import VrBounds, VrModel, make_emulator as vr_emulator
from actorcover.tsg import CoverGraph, min_suite

VR_BOUNDS = VrBounds(replicas=3, max_queries=1, max_views=1)
KV_BOUNDS = KvBounds(actors=3, max_sets=1)


def _suite_file(tmp_path, model, graph, suite):
    cover_edges = [(e.source, e.destination) for e in graph.edges]
    del cover_edges
    steps = [
        [(graph.edges[eid].action, graph.edges[eid].destination) for eid in path]
        for path in suite.paths
    ]
    out = tmp_path / f"{model.name}.suite"
    write_suite_file(
        out, model.name, model.bounds_value(), graph.stats_value(), graph.states, steps
    )
    return read_suite_file(out)


@pytest.fixture(scope="session")
def vr_graph():
    model = VrModel(VR_BOUNDS)
    result = explore(model)
    assert not result.violations
    return model, result.graph


@pytest.fixture(scope="session")
def vr_min_suite(vr_graph, tmp_path_factory):
    model, graph = vr_graph
    cover = CoverGraph(graph.state_count, [(e.source, e.destination) for e in graph.edges])
    suite = min_suite(cover)
    loaded = _suite_file(tmp_path_factory.mktemp("vr"), model, graph, suite)
    return loaded


@pytest.fixture(scope="session")
def vr_factory():
    return lambda: vr_emulator(VR_BOUNDS)


@pytest.fixture(scope="session")
def kv_graph():
    model = KvModel(KV_BOUNDS)
    result = explore(model)
    assert not result.violations
    return model, result.graph


@pytest.fixture(scope="session")
def kv_min_suite(kv_graph, tmp_path_factory):
    model, graph = kv_graph
    cover = CoverGraph(graph.state_count, [(e.source, e.destination) for e in graph.edges])
    suite = min_suite(cover)
    return _suite_file(tmp_path_factory.mktemp("kv"), model, graph, suite)


@pytest.fixture(scope="session")
def kv_factory():
    return lambda: kv_emulator(KV_BOUNDS)
