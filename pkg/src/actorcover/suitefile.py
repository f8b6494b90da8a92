"""Line-delimited graph and suite files shared by the whole pipeline.

Layout (UTF-8, LF newlines, TAB-separated fields):

    AC1 <kind> model=<name> bounds=<canon> stats=<canon> hash=<sha256>
    S <index> <canonical system state>          graph and suite files
    E <src> <dst> <canonical action>            graph files
    P <count> <action> <dest> <action> <dest>…  suite files
    P <count> <edge-id> <edge-id>…              bare paths files

``kind`` is one of graph / suite / paths.  State index 1 is always the
initial state and S lines appear in index order.  The hash covers every
byte after the header line, so readers can reject tampered or truncated
files, and replay logs can pin the exact suite they were produced from.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from . import canon
from .actors import Action
from .explore import TransitionGraph
from .model import ModelState
from .tsg import CoverGraph, TestSuite

FORMAT_VERSION = "AC1"


class MalformedInputError(Exception):
    """File does not parse; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class GraphFile:
    model: str
    bounds: canon.Record
    stats: canon.Record
    content_hash: str
    states: list[ModelState]
    edges: list[tuple[int, Action, int]]

    def cover_graph(self) -> CoverGraph:
        return CoverGraph(len(self.states), [(src, dst) for src, _a, dst in self.edges])

    def edge_label(self, eid: int) -> tuple[Action, int]:
        src, action, dst = self.edges[eid]
        return action, dst


@dataclass
class SuiteFile:
    model: str
    bounds: canon.Record
    stats: canon.Record
    content_hash: str
    states: list[ModelState]
    paths: list[list[tuple[Action, int]]]

    def state(self, index: int) -> ModelState:
        return self.states[index - 1]

    @property
    def path_count(self) -> int:
        return len(self.paths)

    @property
    def total_length(self) -> int:
        return sum(len(p) for p in self.paths)


@dataclass
class PathsFile:
    stats: canon.Record
    content_hash: str
    paths: list[list[int]]


def _header(kind: str, model: str, bounds, stats, digest: str) -> str:
    return "\t".join(
        (
            FORMAT_VERSION,
            kind,
            f"model={model}",
            f"bounds={canon.dumps(bounds)}",
            f"stats={canon.dumps(stats)}",
            f"hash={digest}",
        )
    )


def _finish(path: Path, kind: str, model: str, bounds, stats, body_lines: list[str]) -> str:
    body = "".join(line + "\n" for line in body_lines)
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    header = _header(kind, model, bounds, stats, digest)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(header + "\n")
        handle.write(body)
    return digest


def write_graph_file(path, model_name: str, bounds, graph: TransitionGraph) -> str:
    """Write states and labeled edges; returns the content hash."""
    lines = []
    for i, state in enumerate(graph.states, start=1):
        lines.append(f"S\t{i}\t{state.key()}")
    for edge in graph.edges:
        lines.append(f"E\t{edge.source}\t{edge.destination}\t{edge.action.key()}")
    return _finish(Path(path), "graph", model_name, bounds, graph.stats_value(), lines)


def write_suite_file(
    path,
    model_name: str,
    bounds,
    stats,
    states: list[ModelState],
    paths: list[list[tuple[Action, int]]],
) -> str:
    lines = []
    for i, state in enumerate(states, start=1):
        lines.append(f"S\t{i}\t{state.key()}")
    for steps in paths:
        fields = [f"P\t{len(steps)}"]
        for action, dest in steps:
            fields.append(action.key())
            fields.append(str(dest))
        lines.append("\t".join(fields))
    return _finish(Path(path), "suite", model_name, bounds, stats, lines)


def write_paths_file(path, stats, suite: TestSuite) -> str:
    """Bare edge-id paths for graphs ingested without states (edge lists)."""
    lines = []
    for p in suite.paths:
        lines.append("\t".join(["P", str(len(p))] + [str(eid) for eid in p]))
    return _finish(Path(path), "paths", "none", canon.Record(), stats, lines)


def _parse_header(line: str):
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 6 or fields[0] != FORMAT_VERSION:
        raise MalformedInputError(1, f"not a {FORMAT_VERSION} file header")
    kind = fields[1]
    try:
        parts = dict(f.split("=", 1) for f in fields[2:])
        model = parts["model"]
        bounds = canon.loads(parts["bounds"])
        stats = canon.loads(parts["stats"])
        digest = parts["hash"]
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedInputError(1, f"bad header: {exc}") from exc
    return kind, model, bounds, stats, digest


def _read(path: Path, expect_kind: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedInputError(0, str(exc)) from exc
    if not text:
        raise MalformedInputError(1, "empty file")
    newline = text.index("\n") if "\n" in text else len(text)
    kind, model, bounds, stats, digest = _parse_header(text[: newline + 1])
    if kind != expect_kind:
        raise MalformedInputError(1, f"expected a {expect_kind} file, found {kind}")
    body = text[newline + 1 :]
    actual = hashlib.sha256(body.encode("utf-8")).hexdigest()
    if actual != digest:
        raise MalformedInputError(1, "content hash mismatch (file corrupted or truncated)")
    return model, bounds, stats, digest, body


def _parse_states(lines, path_desc: str) -> list[ModelState]:
    states: list[ModelState] = []
    for lineno, fields in lines:
        if fields[0] != "S":
            continue
        if len(fields) != 3:
            raise MalformedInputError(lineno, "S line needs index and state")
        try:
            index = int(fields[1])
            state = ModelState.from_value(canon.loads(fields[2]))
        except (ValueError, TypeError, KeyError) as exc:
            raise MalformedInputError(lineno, f"bad state: {exc}") from exc
        if index != len(states) + 1:
            raise MalformedInputError(lineno, f"state index {index} out of order")
        states.append(state)
    if not states:
        raise MalformedInputError(1, f"{path_desc} has no states (index 1 required)")
    return states


def _body_lines(body: str):
    out = []
    for lineno, line in enumerate(body.splitlines(), start=2):
        if line.strip():
            out.append((lineno, line.split("\t")))
    return out


def read_graph_file(path) -> GraphFile:
    model, bounds, stats, digest, body = _read(Path(path), "graph")
    lines = _body_lines(body)
    states = _parse_states(lines, "graph file")
    edges: list[tuple[int, Action, int]] = []
    for lineno, fields in lines:
        if fields[0] != "E":
            if fields[0] not in ("S",):
                raise MalformedInputError(lineno, f"unknown record {fields[0]!r}")
            continue
        if len(fields) != 4:
            raise MalformedInputError(lineno, "E line needs src, dst and action")
        try:
            src, dst = int(fields[1]), int(fields[2])
            action = Action.from_value(canon.loads(fields[3]))
        except (ValueError, TypeError, KeyError) as exc:
            raise MalformedInputError(lineno, f"bad edge: {exc}") from exc
        if not (1 <= src <= len(states) and 1 <= dst <= len(states)):
            raise MalformedInputError(lineno, f"edge endpoint out of range: {src}->{dst}")
        edges.append((src, action, dst))
    return GraphFile(model, bounds, stats, digest, states, edges)


def read_suite_file(path) -> SuiteFile:
    model, bounds, stats, digest, body = _read(Path(path), "suite")
    lines = _body_lines(body)
    states = _parse_states(lines, "suite file")
    paths: list[list[tuple[Action, int]]] = []
    for lineno, fields in lines:
        if fields[0] != "P":
            if fields[0] not in ("S",):
                raise MalformedInputError(lineno, f"unknown record {fields[0]!r}")
            continue
        try:
            count = int(fields[1])
        except (IndexError, ValueError) as exc:
            raise MalformedInputError(lineno, "P line needs an edge count") from exc
        if len(fields) != 2 + 2 * count:
            raise MalformedInputError(lineno, f"P line claims {count} edges, fields disagree")
        steps = []
        for k in range(count):
            try:
                action = Action.from_value(canon.loads(fields[2 + 2 * k]))
                dest = int(fields[3 + 2 * k])
            except (ValueError, TypeError, KeyError) as exc:
                raise MalformedInputError(lineno, f"bad path step {k}: {exc}") from exc
            if not 1 <= dest <= len(states):
                raise MalformedInputError(lineno, f"destination index {dest} out of range")
            steps.append((action, dest))
        paths.append(steps)
    return SuiteFile(model, bounds, stats, digest, states, paths)


def read_paths_file(path) -> PathsFile:
    _model, _bounds, stats, digest, body = _read(Path(path), "paths")
    paths: list[list[int]] = []
    for lineno, fields in _body_lines(body):
        if fields[0] != "P":
            raise MalformedInputError(lineno, f"unknown record {fields[0]!r}")
        try:
            count = int(fields[1])
            eids = [int(f) for f in fields[2:]]
        except (IndexError, ValueError) as exc:
            raise MalformedInputError(lineno, "bad P line") from exc
        if len(eids) != count:
            raise MalformedInputError(lineno, f"P line claims {count} edges, fields disagree")
        paths.append(eids)
    return PathsFile(stats, digest, paths)


def parse_edge_list(text: str) -> CoverGraph:
    """Plain ``u v`` edge lines, 1-based, source fixed at vertex 1.

    Blank lines and ``#`` comments are ignored; the vertex count is the
    largest mentioned vertex.
    """
    edges: list[tuple[int, int]] = []
    n = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedInputError(lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise MalformedInputError(lineno, f"expected integers, got {line!r}") from exc
        if u < 1 or v < 1:
            raise MalformedInputError(lineno, "vertices are 1-based")
        n = max(n, u, v)
        edges.append((u, v))
    return CoverGraph(n, edges)
