"""Synchronous dataflow graphs of adder / shift / delay networks.

A :class:`Dfg` is built through :func:`validate`, which checks the structural
invariants once; afterwards the graph is treated as immutable.  Transformations
return new graphs.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Mapping, Sequence

from .errors import DfgFoldError

OPS = ("input", "output", "add", "gain")
OUT_PORT = "out"

# exhaustive cut-set enumeration bound (number of edges)
CUTSET_EXHAUSTIVE_EDGES = 20
CUTSET_FALLBACK_SIZE = 4


class InvalidGraph(DfgFoldError):
    """Graph violates a structural invariant.

    ``diagnostics`` holds every problem found, not just the first one.
    """

    def __init__(self, diagnostics: Sequence[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


class DanglingPort(InvalidGraph):
    pass


class CombinationalLoop(InvalidGraph):
    pass


class DuplicateId(InvalidGraph):
    pass


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    cycle: tuple[str, ...] = ()


_ERROR_CLASSES = {
    "DanglingPort": DanglingPort,
    "CombinationalLoop": CombinationalLoop,
    "DuplicateId": DuplicateId,
}


@dataclass(frozen=True)
class NodeKind:
    """Operation performed by a node.  ``shift`` only matters for gains."""

    op: str
    shift: int = 0

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown node kind {self.op!r}")
        if self.op != "gain" and self.shift:
            raise ValueError("only gain nodes carry a shift amount")

    @classmethod
    def parse(cls, text: str) -> NodeKind:
        op, _, arg = text.partition(":")
        if op == "gain":
            if not arg:
                raise ValueError("gain needs a shift amount, e.g. gain:-1")
            return cls("gain", int(arg))
        if arg:
            raise ValueError(f"kind {op!r} takes no argument")
        return cls(op)

    @property
    def in_ports(self) -> tuple[str, ...]:
        return {"input": (), "output": ("p0",), "add": ("p0", "p1"), "gain": ("p0",)}[self.op]

    @property
    def has_output(self) -> bool:
        return self.op != "output"

    @property
    def is_compute(self) -> bool:
        return self.op in ("add", "gain")

    def __str__(self) -> str:
        return f"gain:{self.shift}" if self.op == "gain" else self.op


@dataclass(frozen=True)
class DfgNode:
    id: str
    kind: NodeKind
    latency: int | None = None

    def __post_init__(self):
        if self.latency is None:
            object.__setattr__(self, "latency", 1 if self.kind.is_compute else 0)
        if self.latency < 0:
            raise ValueError(f"node {self.id}: latency must be non-negative")


@dataclass(frozen=True)
class DfgEdge:
    id: str
    src: str
    dst: str
    dst_port: str
    w: int = 0
    src_port: str = OUT_PORT


@dataclass(frozen=True)
class CutSet:
    edges: frozenset[str]

    def __iter__(self):
        return iter(sorted(self.edges))

    def __len__(self):
        return len(self.edges)

    def sort_key(self):
        return (len(self.edges), tuple(sorted(self.edges)))


@dataclass(frozen=True)
class Dfg:
    """Validated dataflow graph.  Construct with :func:`validate`."""

    nodes: tuple[DfgNode, ...]
    edges: tuple[DfgEdge, ...]
    name: str = field(default="", compare=False)

    @cached_property
    def _node_map(self) -> dict[str, DfgNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _edge_map(self) -> dict[str, DfgEdge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _in_edges(self) -> dict[str, tuple[DfgEdge, ...]]:
        acc: dict[str, list[DfgEdge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            acc[e.dst].append(e)
        ports = {n.id: n.kind.in_ports for n in self.nodes}
        return {k: tuple(sorted(v, key=lambda e: ports[k].index(e.dst_port))) for k, v in acc.items()}

    @cached_property
    def _out_edges(self) -> dict[str, tuple[DfgEdge, ...]]:
        acc: dict[str, list[DfgEdge]] = {n.id: [] for n in self.nodes}
        for e in self.edges:
            acc[e.src].append(e)
        return {k: tuple(v) for k, v in acc.items()}

    def node(self, node_id: str) -> DfgNode:
        return self._node_map[node_id]

    def edge(self, edge_id: str) -> DfgEdge:
        return self._edge_map[edge_id]

    def has_node(self, node_id: str) -> bool:
        return node_id in self._node_map

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._edge_map

    def in_edges(self, node_id: str) -> tuple[DfgEdge, ...]:
        """Incoming edges ordered by destination port."""
        return self._in_edges[node_id]

    def out_edges(self, node_id: str) -> tuple[DfgEdge, ...]:
        return self._out_edges[node_id]

    @property
    def inputs(self) -> list[str]:
        return [n.id for n in self.nodes if n.kind.op == "input"]

    @property
    def outputs(self) -> list[str]:
        return [n.id for n in self.nodes if n.kind.op == "output"]

    @property
    def compute_nodes(self) -> list[str]:
        return [n.id for n in self.nodes if n.kind.is_compute]

    @cached_property
    def zero_delay_order(self) -> tuple[str, ...]:
        """Node ids in a topological order of the zero-delay subgraph."""
        return _zero_delay_order(self.nodes, self.edges)

    @property
    def total_delays(self) -> int:
        return sum(e.w for e in self.edges)

    def with_weights(self, weights: Mapping[str, int]) -> Dfg:
        """Copy of the graph with some edge weights replaced."""
        unknown = set(weights) - set(self._edge_map)
        if unknown:
            raise KeyError(f"unknown edges: {sorted(unknown)}")
        edges = [replace(e, w=weights.get(e.id, e.w)) for e in self.edges]
        return validate(self.nodes, edges, name=self.name)


def _zero_delay_order(nodes, edges) -> tuple[str, ...]:
    ts = TopologicalSorter({n.id: set() for n in nodes})
    for e in edges:
        if e.w == 0:
            ts.add(e.dst, e.src)
    # static_order is deterministic for a fixed insertion order
    return tuple(ts.static_order())


def validate(nodes: Iterable[DfgNode], edges: Iterable[DfgEdge], name: str = "") -> Dfg:
    """Check structural invariants and freeze the graph.

    Raises the error class of the first problem found (``DuplicateId``,
    ``DanglingPort``, ``CombinationalLoop`` or plain ``InvalidGraph``); the
    exception carries the full diagnostic list.
    """
    nodes = tuple(nodes)
    edges = tuple(edges)
    diags: list[Diagnostic] = []

    seen: set[str] = set()
    for n in nodes:
        if n.id in seen:
            diags.append(Diagnostic("DuplicateId", f"duplicate node id {n.id!r}"))
        seen.add(n.id)
    seen_e: set[str] = set()
    for e in edges:
        if e.id in seen_e:
            diags.append(Diagnostic("DuplicateId", f"duplicate edge id {e.id!r}"))
        seen_e.add(e.id)

    node_map = {n.id: n for n in nodes}
    driven: dict[tuple[str, str], str] = {}
    for e in edges:
        if e.w < 0:
            diags.append(Diagnostic("InvalidGraph", f"edge {e.id}: negative delay count {e.w}"))
        src, dst = node_map.get(e.src), node_map.get(e.dst)
        if src is None:
            diags.append(Diagnostic("InvalidGraph", f"edge {e.id}: unknown source node {e.src!r}"))
        elif not src.kind.has_output or e.src_port != OUT_PORT:
            diags.append(Diagnostic("InvalidGraph", f"edge {e.id}: {e.src}.{e.src_port} is not an output port"))
        if dst is None:
            diags.append(Diagnostic("InvalidGraph", f"edge {e.id}: unknown destination node {e.dst!r}"))
            continue
        if e.dst_port not in dst.kind.in_ports:
            diags.append(Diagnostic("InvalidGraph", f"edge {e.id}: {e.dst} has no in-port {e.dst_port!r}"))
            continue
        key = (e.dst, e.dst_port)
        if key in driven:
            diags.append(
                Diagnostic("InvalidGraph", f"{e.dst}.{e.dst_port} driven by both {driven[key]} and {e.id}")
            )
        driven[key] = e.id

    for n in nodes:
        for p in n.kind.in_ports:
            if (n.id, p) not in driven:
                diags.append(Diagnostic("DanglingPort", f"in-port {n.id}.{p} is not driven"))

    if not any(n.kind.op == "input" for n in nodes):
        diags.append(Diagnostic("InvalidGraph", "graph has no input node"))
    if not any(n.kind.op == "output" for n in nodes):
        diags.append(Diagnostic("InvalidGraph", "graph has no output node"))

    if not diags:
        try:
            _zero_delay_order(nodes, edges)
        except CycleError as exc:
            cycle = tuple(exc.args[1])
            diags.append(
                Diagnostic(
                    "CombinationalLoop",
                    "zero-delay cycle " + " -> ".join(cycle),
                    cycle=cycle,
                )
            )

    if diags:
        cls = _ERROR_CLASSES.get(diags[0].code, InvalidGraph)
        raise cls(diags)
    return Dfg(nodes, edges, name=name)


def critical_path(dfg: Dfg) -> tuple[list[str], int]:
    """Longest chain of compute nodes joined by zero-delay edges.

    Length is the sum of node latencies.  Among equally long chains the
    lexicographically smallest id sequence wins.  Input and output nodes are
    ports, not logic, and never appear in the path.
    """
    compute = set(dfg.compute_nodes)
    best: dict[str, tuple[int, list[str]]] = {}
    for nid in reversed(dfg.zero_delay_order):
        if nid not in compute:
            continue
        lat = dfg.node(nid).latency
        options = [(lat, [nid])]
        for e in dfg.out_edges(nid):
            if e.w == 0 and e.dst in best:
                length, path = best[e.dst]
                options.append((lat + length, [nid] + path))
        best[nid] = min(options, key=lambda o: (-o[0], o[1]))
    if not best:
        return [], 0
    length, path = min(best.values(), key=lambda o: (-o[0], o[1]))
    return path, length


def cutset_violation(dfg: Dfg, edge_ids: Iterable[str]) -> str | None:
    """Explain why ``edge_ids`` is not a feed-forward cut-set, or return None.

    Walks are tracked together with the number of cut edges crossed so far
    (0, 1 or "2 or more"); a valid set lets every output be reached only with
    exactly one crossing.  Loops through the cut show up as double crossings.
    """
    cut = set(edge_ids)
    unknown = cut - {e.id for e in dfg.edges}
    if unknown:
        return f"unknown edges {sorted(unknown)}"

    start = [(i, 0) for i in dfg.inputs]
    parent: dict[tuple[str, int], tuple[tuple[str, int], str] | None] = {s: None for s in start}
    queue = deque(start)
    while queue:
        state = queue.popleft()
        nid, count = state
        for e in dfg.out_edges(nid):
            nxt = (e.dst, min(count + (e.id in cut), 2))
            if nxt not in parent:
                parent[nxt] = (state, e.id)
                queue.append(nxt)

    def witness(state):
        nodes = [state[0]]
        while parent[state] is not None:
            state = parent[state][0]
            nodes.append(state[0])
        return " -> ".join(reversed(nodes))

    for out in dfg.outputs:
        if (out, 0) in parent:
            return f"path {witness((out, 0))} does not cross the cut"
        if (out, 2) in parent:
            return f"path {witness((out, 2))} crosses the cut more than once"

    reaches_out = _reverse_reachable(dfg, dfg.outputs)
    for eid in sorted(cut):
        e = dfg.edge(eid)
        if (e.src, 0) not in parent or e.dst not in reaches_out:
            return f"edge {eid} lies on no input-to-output path"
    if not cut:
        return "empty cut"
    return None


def _reverse_reachable(dfg: Dfg, targets: Iterable[str]) -> set[str]:
    seen = set(targets)
    queue = deque(seen)
    while queue:
        nid = queue.popleft()
        for e in dfg.in_edges(nid):
            if e.src not in seen:
                seen.add(e.src)
                queue.append(e.src)
    return seen


def is_feedforward_cutset(dfg: Dfg, edge_ids: Iterable[str]) -> bool:
    return cutset_violation(dfg, edge_ids) is None


def feedforward_cutsets(dfg: Dfg, max_results: int = 50) -> list[CutSet]:
    """Feed-forward cut-sets ordered by size, then by sorted edge ids.

    Exhaustive up to ``CUTSET_EXHAUSTIVE_EDGES`` edges; larger graphs only get
    cuts of at most ``CUTSET_FALLBACK_SIZE`` edges.
    """
    ids = sorted(e.id for e in dfg.edges)
    max_size = len(ids) if len(ids) <= CUTSET_EXHAUSTIVE_EDGES else CUTSET_FALLBACK_SIZE
    found: list[CutSet] = []
    for size in range(1, max_size + 1):
        # combinations of a sorted list come out in lexicographic order
        for combo in itertools.combinations(ids, size):
            if cutset_violation(dfg, combo) is None:
                found.append(CutSet(frozenset(combo)))
                if len(found) >= max_results:
                    return found
    return found
