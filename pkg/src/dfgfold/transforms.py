"""Cut-set pipelining and folding of dataflow graphs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .dfg import CutSet, Dfg, DfgEdge, cutset_violation
from .errors import DfgFoldError

DEFAULT_STAGES = {"add": 1, "gain": 1}
MAX_SEARCH_NODES = 8


class InvalidCutSet(DfgFoldError):
    pass


class UnmappedNode(DfgFoldError):
    pass


class DuplicateNode(DfgFoldError):
    pass


class InvalidFoldingSpec(DfgFoldError):
    pass


class TooLarge(DfgFoldError):
    pass


class FoldingInfeasible(DfgFoldError):
    """Some folded edge delays came out negative.

    ``violations`` lists ``(edge id, delay)`` for every offending edge.
    """

    def __init__(self, violations: list[tuple[str, int]]):
        self.violations = violations
        detail = ", ".join(f"{eid}: {d}" for eid, d in violations)
        super().__init__(f"negative folded delays ({detail}); try reordering the folding sets")


@dataclass(frozen=True)
class FoldingSpec:
    """Folding factor plus ordered folding sets.

    ``units`` maps a hardware unit id to the node ids it executes, position
    being the time partition; ``None`` marks an idle partition.
    """

    factor: int
    units: Mapping[str, tuple[str | None, ...]]
    pipeline_stages: Mapping[str, int] = field(default_factory=lambda: dict(DEFAULT_STAGES))

    def __post_init__(self):
        if self.factor < 1:
            raise InvalidFoldingSpec(f"folding factor must be >= 1, got {self.factor}")
        units = {}
        seen: dict[str, str] = {}
        for uid, order in self.units.items():
            order = tuple(order)
            while order and order[-1] is None:
                order = order[:-1]
            if len(order) > self.factor:
                raise InvalidFoldingSpec(
                    f"unit {uid} has {len(order)} slots but the folding factor is {self.factor}"
                )
            for nid in order:
                if nid is None:
                    continue
                if nid in seen:
                    raise DuplicateNode(f"node {nid} appears in both {seen[nid]} and {uid}")
                seen[nid] = uid
            units[uid] = order
        stages = dict(DEFAULT_STAGES)
        stages.update(self.pipeline_stages)
        if any(p < 0 for p in stages.values()):
            raise InvalidFoldingSpec("pipeline stages must be non-negative")
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "pipeline_stages", stages)
        object.__setattr__(self, "_placement", {
            nid: (uid, slot)
            for uid, order in units.items()
            for slot, nid in enumerate(order)
            if nid is not None
        })

    def placement(self, node_id: str) -> tuple[str, int]:
        """(unit id, fold order) of a node."""
        try:
            return self._placement[node_id]
        except KeyError:
            raise UnmappedNode(f"node {node_id} is not in any folding set") from None

    def mapped_nodes(self) -> set[str]:
        return set(self._placement)

    def stages(self, op: str) -> int:
        return self.pipeline_stages.get(op, 1)

    def sort_key(self):
        return tuple((uid, tuple(n or "" for n in self.units[uid])) for uid in sorted(self.units))


@dataclass(frozen=True)
class Connection:
    """One source edge routed through the folded architecture.

    ``slot`` is the cycle within the frame at which the consumer reads the
    value; for outputs it is the capture offset and may exceed ``N - 1``.
    ``src_unit``/``dst_unit`` are ``None`` for external inputs/outputs.
    """

    edge: str
    src: str
    dst: str
    dst_port: str
    src_unit: str | None
    dst_unit: str | None
    slot: int
    delay: int
    role: str  # "internal", "input" or "output"


@dataclass(frozen=True)
class FoldedArch:
    dfg: Dfg
    spec: FoldingSpec
    connections: tuple[Connection, ...]
    output_latency: Mapping[str, int]

    @property
    def factor(self) -> int:
        return self.spec.factor

    @property
    def units(self) -> list[str]:
        return sorted(self.spec.units)

    def delays(self) -> dict[str, int]:
        """Folded delay of every unit-to-unit connection, keyed by edge id."""
        return {c.edge: c.delay for c in self.connections if c.role == "internal"}

    def connection(self, edge_id: str) -> Connection:
        for c in self.connections:
            if c.edge == edge_id:
                return c
        raise KeyError(edge_id)

    def unit_op(self, unit: str) -> str:
        nid = next(n for n in self.spec.units[unit] if n is not None)
        return self.dfg.node(nid).kind.op

    def latency_samples(self, output: str | None = None) -> int:
        """Whole-sample offset of an output relative to the unfolded graph."""
        out = output or self.dfg.outputs[0]
        return self.output_latency[out] // self.factor


def _stages_of(dfg: Dfg, spec: FoldingSpec, node_id: str) -> int:
    return spec.stages(dfg.node(node_id).kind.op)


def folded_edge_delay(edge: DfgEdge, spec: FoldingSpec, dfg: Dfg | None = None) -> int:
    """Registers needed on ``edge`` once folded: N*w - P_u + v - u.

    The result can be negative; deciding feasibility is up to the caller.
    Without ``dfg`` the source kind is unknown, so all configured pipeline
    depths must agree.
    """
    _, u = spec.placement(edge.src)
    _, v = spec.placement(edge.dst)
    if dfg is not None:
        p = _stages_of(dfg, spec, edge.src)
    else:
        depths = set(spec.pipeline_stages.values())
        if len(depths) != 1:
            raise InvalidFoldingSpec("pass the graph to resolve per-kind pipeline depths")
        p = depths.pop()
    return spec.factor * edge.w - p + v - u


def _check_spec(dfg: Dfg, spec: FoldingSpec) -> None:
    compute = set(dfg.compute_nodes)
    mapped = spec.mapped_nodes()
    missing = sorted(compute - mapped)
    if missing:
        raise UnmappedNode(f"compute nodes missing from the folding sets: {', '.join(missing)}")
    extra = sorted(mapped - compute)
    if extra:
        raise InvalidFoldingSpec(f"folding sets name non-compute or unknown nodes: {', '.join(extra)}")
    for uid, order in spec.units.items():
        ops = {dfg.node(n).kind.op for n in order if n is not None}
        if len(ops) > 1:
            raise InvalidFoldingSpec(f"unit {uid} mixes node kinds {sorted(ops)}")


def _connections(dfg: Dfg, spec: FoldingSpec) -> tuple[list[Connection], dict[str, int]]:
    n = spec.factor
    conns = []
    out_latency = {}
    for e in dfg.edges:
        src = dfg.node(e.src)
        dst = dfg.node(e.dst)
        if src.kind.is_compute:
            src_unit, u = spec.placement(e.src)
            p = _stages_of(dfg, spec, e.src)
        else:
            # external samples enter at the start of each frame
            src_unit, u, p = None, 0, 0
        if dst.kind.is_compute:
            dst_unit, v = spec.placement(e.dst)
            role = "internal" if src_unit is not None else "input"
        else:
            # outputs are registered as soon as the producer finishes
            dst_unit, v = None, u + p
            role = "output"
            out_latency[e.dst] = v
        conns.append(
            Connection(
                edge=e.id,
                src=e.src,
                dst=e.dst,
                dst_port=e.dst_port,
                src_unit=src_unit,
                dst_unit=dst_unit,
                slot=v,
                delay=n * e.w - p + v - u,
                role=role,
            )
        )
    return conns, out_latency


def fold(dfg: Dfg, spec: FoldingSpec) -> FoldedArch:
    """Time-multiplex ``dfg`` onto the units described by ``spec``.

    Unit H_V consumes, at cycle l*N + v, the value H_U produced D_F cycles
    earlier.  Raises ``FoldingInfeasible`` listing every negative delay.
    """
    _check_spec(dfg, spec)
    conns, out_latency = _connections(dfg, spec)
    bad = [(c.edge, c.delay) for c in conns if c.delay < 0]
    if bad:
        raise FoldingInfeasible(bad)
    return FoldedArch(dfg, spec, tuple(conns), out_latency)


@dataclass(frozen=True)
class PipelineResult:
    dfg: Dfg
    inserted_registers: int
    stages: int
    added_latency: int


def pipeline(dfg: Dfg, cutset: CutSet | Iterable[str], registers_per_edge: int = 1) -> PipelineResult:
    """Insert ``registers_per_edge`` delays on every edge of a feed-forward cut-set."""
    if registers_per_edge < 1:
        raise ValueError("registers_per_edge must be positive")
    ids = sorted(cutset.edges if isinstance(cutset, CutSet) else set(cutset))
    problem = cutset_violation(dfg, ids)
    if problem is not None:
        raise InvalidCutSet(f"{{{', '.join(ids)}}} is not a feed-forward cut-set: {problem}")
    new = dfg.with_weights({eid: dfg.edge(eid).w + registers_per_edge for eid in ids})
    return PipelineResult(
        dfg=new,
        inserted_registers=len(ids) * registers_per_edge,
        stages=2,
        added_latency=registers_per_edge,
    )


def search_folding_orders(
    dfg: Dfg,
    factor: int,
    unit_assignment: Mapping[str, str],
    pipeline_stages: Mapping[str, int] | None = None,
) -> list[FoldingSpec]:
    """Every slot ordering of the given folding sets with no negative delay.

    Sorted by total unit-to-unit delay, then lexicographically.
    """
    compute = dfg.compute_nodes
    if len(compute) > MAX_SEARCH_NODES:
        raise TooLarge(f"{len(compute)} compute nodes; exhaustive search is limited to {MAX_SEARCH_NODES}")
    missing = sorted(set(compute) - set(unit_assignment))
    if missing:
        raise UnmappedNode(f"no unit given for: {', '.join(missing)}")
    groups: dict[str, list[str]] = {}
    for nid, uid in sorted(unit_assignment.items()):
        groups.setdefault(uid, []).append(nid)
    for uid, members in groups.items():
        if len(members) > factor:
            raise InvalidFoldingSpec(f"unit {uid} holds {len(members)} nodes but the folding factor is {factor}")

    stages = dict(DEFAULT_STAGES)
    stages.update(pipeline_stages or {})
    unit_ids = sorted(groups)
    per_unit = [list(itertools.permutations(range(factor), len(groups[uid]))) for uid in unit_ids]
    n_combos = math.prod(len(p) for p in per_unit)
    if n_combos > 10**6:
        raise TooLarge(f"{n_combos} orderings exceed the search budget")

    internal = [e for e in dfg.edges if dfg.node(e.src).kind.is_compute and dfg.node(e.dst).kind.is_compute]
    p_of = {nid: stages.get(dfg.node(nid).kind.op, 1) for nid in compute}

    results = []
    for combo in itertools.product(*per_unit):
        slot = {}
        for uid, slots in zip(unit_ids, combo):
            for nid, s in zip(groups[uid], slots):
                slot[nid] = s
        delays = [factor * e.w - p_of[e.src] + slot[e.dst] - slot[e.src] for e in internal]
        if any(d < 0 for d in delays):
            continue
        units = {}
        for uid, slots in zip(unit_ids, combo):
            order: list[str | None] = [None] * factor
            for nid, s in zip(groups[uid], slots):
                order[s] = nid
            units[uid] = tuple(order)
        spec = FoldingSpec(factor, units, stages)
        results.append((sum(delays), spec.sort_key(), spec))
    results.sort(key=lambda r: (r[0], r[1]))
    return [r[2] for r in results]
