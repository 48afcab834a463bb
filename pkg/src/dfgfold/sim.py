"""Bit-exact cycle simulation of unfolded graphs and folded architectures.

All arithmetic runs on two's-complement integer codes (``value * 2**F``).
Delay registers reset to zero.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence, Union

from .dfg import Dfg
from .errors import DfgFoldError
from .stimulus import Stimulus, gen_stimulus
from .transforms import FoldedArch

StimulusLike = Union[Stimulus, Sequence[float]]


class OverflowDetected(DfgFoldError):
    pass


class SaturationWarning(UserWarning):
    pass


class NoAlignment(DfgFoldError):
    pass


@dataclass(frozen=True)
class FixedPointConfig:
    """``width`` total bits, ``frac`` fraction bits, ``overflow`` 'saturate' or 'wrap'."""

    width: int = 16
    frac: int = 8
    overflow: str = "saturate"

    def __post_init__(self):
        if not 1 <= self.frac < self.width <= 64:
            raise ValueError(f"need 1 <= F < W <= 64, got W={self.width} F={self.frac}")
        if self.overflow not in ("saturate", "wrap"):
            raise ValueError(f"overflow mode must be 'saturate' or 'wrap', not {self.overflow!r}")

    @classmethod
    def parse(cls, text: str, overflow: str = "saturate") -> FixedPointConfig:
        """``"16.8"`` -> W=16, F=8."""
        w, _, f = text.partition(".")
        return cls(int(w), int(f), overflow)

    @property
    def lo(self) -> int:
        return -(1 << (self.width - 1))

    @property
    def hi(self) -> int:
        return (1 << (self.width - 1)) - 1

    @property
    def scale(self) -> int:
        return 1 << self.frac

    def to_code(self, x: float) -> int:
        return math.floor(x * self.scale + 0.5)

    def to_float(self, code: int) -> float:
        return code / self.scale

    def describe(self) -> str:
        return f"W={self.width} F={self.frac} overflow={self.overflow}"


DEFAULT_FIXED = FixedPointConfig()


class _Arith:
    """Quantizing arithmetic shared by both simulators."""

    def __init__(self, cfg: FixedPointConfig):
        self.cfg = cfg
        self.saturations = 0
        self._mask = (1 << cfg.width) - 1
        self._sign = 1 << (cfg.width - 1)

    def fit(self, v: int) -> int:
        cfg = self.cfg
        if cfg.lo <= v <= cfg.hi:
            return v
        if cfg.overflow == "wrap":
            v &= self._mask
            return v - (1 << cfg.width) if v & self._sign else v
        self.saturations += 1
        return cfg.hi if v > cfg.hi else cfg.lo

    def sample(self, x: float) -> int:
        return self.fit(self.cfg.to_code(x))

    def apply(self, op: str, shift: int, operands: Sequence[int]) -> int:
        if op == "add":
            return self.fit(operands[0] + operands[1])
        if op == "gain":
            v = operands[0]
            # negative shifts truncate toward minus infinity
            return self.fit(v << shift if shift >= 0 else v >> -shift)
        return operands[0]


@dataclass
class SimTrace:
    """Per-cycle integer codes for every probed signal.

    For folded runs ``cycles_per_sample`` is the folding factor and
    ``output_latency`` records, per output, the cycle offset at which the
    first result is captured.
    """

    signals: dict[str, list[int]]
    cfg: FixedPointConfig
    outputs: tuple[str, ...]
    sample_rate: float = 360.0
    cycles_per_sample: int = 1
    output_latency: dict[str, int] = field(default_factory=dict)
    overflow_count: int = 0

    @property
    def n_cycles(self) -> int:
        return len(next(iter(self.signals.values()))) if self.signals else 0

    def codes(self, signal: str | None = None) -> list[int]:
        return self.signals[signal or self.outputs[0]]

    def samples(self, signal: str | None = None) -> list[int]:
        """One code per input sample; folded outputs are read at their capture phase."""
        sig = signal or self.outputs[0]
        phase = self.output_latency.get(sig, 0) % self.cycles_per_sample
        return self.signals[sig][phase :: self.cycles_per_sample]

    def values(self, signal: str | None = None) -> list[float]:
        return [self.cfg.to_float(c) for c in self.samples(signal)]

    def latency(self, signal: str | None = None) -> int | None:
        """Sample offset against the unfolded graph, when known analytically."""
        sig = signal or self.outputs[0]
        if sig not in self.output_latency:
            return None
        return self.output_latency[sig] // self.cycles_per_sample

    def records(self) -> Iterator[tuple[int, str, int]]:
        for cycle in range(self.n_cycles):
            for name, vals in self.signals.items():
                yield cycle, name, vals[cycle]

    def to_csv(self) -> str:
        buf = io.StringIO()
        meta = [
            self.cfg.describe(),
            f"sample_rate={self.sample_rate:g}",
            f"cycles_per_sample={self.cycles_per_sample}",
            "outputs=" + ";".join(self.outputs),
        ]
        if self.output_latency:
            meta.append("latency=" + ";".join(f"{k}:{v}" for k, v in self.output_latency.items()))
        buf.write("# " + " ".join(meta) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cycle", "signal", "value"])
        w.writerows(self.records())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> SimTrace:
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing metadata comment line")
        meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
        cfg = FixedPointConfig(int(meta["W"]), int(meta["F"]), meta["overflow"])
        latency = {}
        if meta.get("latency"):
            for item in meta["latency"].split(";"):
                k, v = item.rsplit(":", 1)
                latency[k] = int(v)
        signals: dict[str, list[int]] = {}
        reader = csv.DictReader(lines[1:])
        for row in reader:
            signals.setdefault(row["signal"], []).append(int(row["value"]))
        return cls(
            signals=signals,
            cfg=cfg,
            outputs=tuple(filter(None, meta.get("outputs", "").split(";"))),
            sample_rate=float(meta.get("sample_rate", 360.0)),
            cycles_per_sample=int(meta.get("cycles_per_sample", 1)),
            output_latency=latency,
        )


def _stimulus_map(inputs: Sequence[str], stim) -> tuple[dict[str, list[float]], float]:
    if isinstance(stim, Mapping):
        missing = set(inputs) - set(stim)
        if missing:
            raise DfgFoldError(f"no stimulus for inputs {sorted(missing)}")
        items = {k: stim[k] for k in inputs}
    else:
        if len(inputs) != 1:
            raise DfgFoldError(f"graph has {len(inputs)} inputs; pass a mapping of stimuli")
        items = {inputs[0]: stim}
    rate = 360.0
    out = {}
    for k, s in items.items():
        if isinstance(s, Stimulus):
            rate = s.sample_rate
            out[k] = gen_stimulus(s)
        else:
            out[k] = [float(v) for v in s]
    return out, rate


def _report_overflow(arith: _Arith, strict: bool) -> None:
    if arith.saturations and arith.cfg.overflow == "saturate":
        msg = f"{arith.saturations} saturation events ({arith.cfg.describe()})"
        if strict:
            raise OverflowDetected(msg)
        warnings.warn(msg, SaturationWarning, stacklevel=3)


def simulate_dfg(
    dfg: Dfg,
    stim: StimulusLike | Mapping[str, StimulusLike],
    cfg: FixedPointConfig = DEFAULT_FIXED,
    length: int | None = None,
    strict: bool = False,
) -> SimTrace:
    """Sample-by-sample reference simulation: one clock per input sample.

    Saturation is reported as a ``SaturationWarning`` (or ``OverflowDetected``
    with ``strict``) and counted in ``SimTrace.overflow_count``.
    """
    xs, rate = _stimulus_map(dfg.inputs, stim)
    n = length if length is not None else max(len(v) for v in xs.values())
    arith = _Arith(cfg)
    hist = {nid: [0] * n for nid in dfg.zero_delay_order}
    plan = []
    for nid in dfg.zero_delay_order:
        node = dfg.node(nid)
        srcs = [(hist[e.src], e.w) for e in dfg.in_edges(nid)]
        plan.append((nid, node.kind.op, node.kind.shift, hist[nid], srcs))

    for t in range(n):
        for nid, op, shift, out, srcs in plan:
            if op == "input":
                x = xs[nid]
                out[t] = arith.sample(x[t]) if t < len(x) else 0
                continue
            operands = [h[t - w] if t >= w else 0 for h, w in srcs]
            out[t] = arith.apply(op, shift, operands)

    _report_overflow(arith, strict)
    order = [n.id for n in dfg.nodes]
    return SimTrace(
        signals={nid: hist[nid] for nid in order},
        cfg=cfg,
        outputs=tuple(dfg.outputs),
        sample_rate=rate,
        overflow_count=arith.saturations,
    )


def simulate_folded(
    arch: FoldedArch,
    stim: StimulusLike | Mapping[str, StimulusLike],
    cfg: FixedPointConfig = DEFAULT_FIXED,
    length: int | None = None,
    strict: bool = False,
) -> SimTrace:
    """Cycle-level simulation of a folded architecture.

    Runs N clock cycles per input sample.  Each unit executes the node in
    its current time partition; every connection is a D_F-deep register
    chain fed by the producing unit's output (or the held input sample).
    Outputs are captured once per frame.  Enough trailing frames are run to
    flush the folding latency.
    """
    dfg = arch.dfg
    nf = arch.factor
    xs, rate = _stimulus_map(dfg.inputs, stim)
    n_samples = length if length is not None else max(len(v) for v in xs.values())
    max_lat = max(arch.output_latency.values(), default=0)
    frames = n_samples + max_lat // nf + 1
    cycles = frames * nf
    arith = _Arith(cfg)

    max_p = max(arch.spec.pipeline_stages.values(), default=0)
    wires: dict[str, list[int]] = {}
    for i in dfg.inputs:
        x = xs[i]
        held = [arith.sample(x[f]) if f < min(len(x), n_samples) else 0 for f in range(frames)]
        wires[i] = [held[c // nf] for c in range(cycles)]
    for uid in arch.units:
        wires["unit:" + uid] = [0] * (cycles + max_p + 1)

    def wire_of(conn):
        return wires[conn.src if conn.src_unit is None else "unit:" + conn.src_unit]

    by_dst: dict[str, list] = {}
    for c in arch.connections:
        if c.role != "output":
            by_dst.setdefault(c.dst, []).append(c)
    topo = {nid: k for k, nid in enumerate(dfg.zero_delay_order)}
    # per time partition: nodes to execute, in zero-delay dependency order
    slots: list[list] = [[] for _ in range(nf)]
    for uid, order in arch.spec.units.items():
        for s, nid in enumerate(order):
            if nid is None:
                continue
            node = dfg.node(nid)
            ports = node.kind.in_ports
            conns = sorted(by_dst.get(nid, []), key=lambda c: ports.index(c.dst_port))
            slots[s].append(
                (
                    topo[nid],
                    node.kind.op,
                    node.kind.shift,
                    wires["unit:" + uid],
                    arch.spec.stages(node.kind.op),
                    [(wire_of(c), c.delay) for c in conns],
                )
            )
    for s in slots:
        s.sort(key=lambda item: item[0])

    out_conns = [c for c in arch.connections if c.role == "output"]
    captures = [(c.dst, c.slot % nf, wire_of(c), c.delay) for c in out_conns]
    outs = {c.dst: [0] * cycles for c in out_conns}
    regs = {c.dst: 0 for c in out_conns}

    for t in range(cycles):
        for _, op, shift, out, p, srcs in slots[t % nf]:
            operands = [w[t - d] if t >= d else 0 for w, d in srcs]
            out[t + p] = arith.apply(op, shift, operands)
        for dst, phase, w, d in captures:
            if t % nf == phase:
                regs[dst] = w[t - d] if t >= d else 0
            outs[dst][t] = regs[dst]

    _report_overflow(arith, strict)
    signals = {i: wires[i] for i in dfg.inputs}
    for uid in arch.units:
        signals["unit:" + uid] = wires["unit:" + uid][:cycles]
    signals.update(outs)
    return SimTrace(
        signals=signals,
        cfg=cfg,
        outputs=tuple(dfg.outputs),
        sample_rate=rate,
        cycles_per_sample=nf,
        output_latency=dict(arch.output_latency),
        overflow_count=arith.saturations,
    )


@dataclass(frozen=True)
class EquivalenceReport:
    offset: int
    matched: int
    max_diff: int

    @property
    def equivalent(self) -> bool:
        return self.matched > 0 and self.max_diff == 0

    def __str__(self) -> str:
        verdict = "equivalent" if self.equivalent else "NOT equivalent"
        return f"{verdict}, offset={self.offset}, max_diff={self.max_diff}, matched={self.matched}"


def _first_nonzero(xs: Sequence[int]) -> int | None:
    return next((i for i, v in enumerate(xs) if v != 0), None)


def equivalence_check(
    reference: SimTrace,
    candidate: SimTrace,
    signal: str | None = None,
    offset: int | None = None,
) -> EquivalenceReport:
    """Compare the output samples of two traces after latency alignment.

    The offset comes from, in order: the ``offset`` argument, the analytic
    latency recorded in the traces, or the first nonzero sample of each.
    """
    ref = reference.samples(signal)
    cand = candidate.samples(signal)
    if offset is None and candidate.latency(signal) is not None:
        offset = candidate.latency(signal) - (reference.latency(signal) or 0)
    if offset is None:
        i, j = _first_nonzero(ref), _first_nonzero(cand)
        if i is None and j is None:
            raise NoAlignment("both traces are all zero and carry no latency metadata")
        offset = 0 if i is None or j is None else j - i
    if offset < 0:
        raise NoAlignment(f"candidate leads the reference by {-offset} samples")
    n = min(len(ref), len(cand) - offset)
    diff = max((abs(ref[k] - cand[k + offset]) for k in range(n)), default=0)
    return EquivalenceReport(offset=offset, matched=max(n, 0), max_diff=diff)
