"""Line-oriented text formats for graphs and folding specs.

Graph file::

    # comment
    node A1 add
    node G gain:-1
    edge a: A1 -> A2.p0 delays=1

Folding spec::

    factor 2
    unit S1 order A1,A0      # position = time partition, _ = idle
    stages add 1
"""

from __future__ import annotations

import re
from importlib import resources
from pathlib import Path

from .dfg import OUT_PORT, Dfg, DfgEdge, DfgNode, NodeKind, validate
from .errors import FileSyntaxError
from .transforms import DuplicateNode, FoldingSpec

_EDGE_RE = re.compile(
    r"^edge\s+(?P<id>[^\s:]+)\s*:\s*(?P<src>[\w.]+)\s*->\s*(?P<dst>[\w.]+)"
    r"(?:\s+delays\s*=\s*(?P<w>-?\d+))?$"
)
_NODE_RE = re.compile(r"^node\s+(?P<id>\w+)\s+(?P<kind>[\w:+-]+)(?:\s+latency\s*=\s*(?P<lat>\d+))?$")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line, raw


def parse_dfg(text: str, name: str = "") -> Dfg:
    nodes: dict[str, DfgNode] = {}
    edges: list[DfgEdge] = []
    pending = []
    for lineno, line, raw in _lines(text):
        if line.startswith("node"):
            m = _NODE_RE.match(line)
            if not m:
                raise FileSyntaxError("expected 'node <id> <kind> [latency=<n>]'", lineno, raw)
            try:
                kind = NodeKind.parse(m["kind"])
            except ValueError as exc:
                raise FileSyntaxError(str(exc), lineno, raw) from None
            lat = int(m["lat"]) if m["lat"] else None
            if m["id"] in nodes:
                raise FileSyntaxError(f"node {m['id']} declared twice", lineno, raw)
            nodes[m["id"]] = DfgNode(m["id"], kind, lat)
        elif line.startswith("edge"):
            m = _EDGE_RE.match(line)
            if not m:
                raise FileSyntaxError("expected 'edge <label>: <src>[.out] -> <dst>.<port> [delays=<w>]'", lineno, raw)
            pending.append((lineno, raw, m))
        else:
            raise FileSyntaxError(f"unknown statement {line.split()[0]!r}", lineno, raw)

    for lineno, raw, m in pending:
        src, _, src_port = m["src"].partition(".")
        dst, _, dst_port = m["dst"].partition(".")
        for nid in (src, dst):
            if nid not in nodes:
                raise FileSyntaxError(f"edge {m['id']} refers to undeclared node {nid}", lineno, raw)
        if not dst_port:
            ports = nodes[dst].kind.in_ports
            if len(ports) != 1:
                raise FileSyntaxError(f"edge {m['id']}: {dst} has several in-ports, name one", lineno, raw)
            dst_port = ports[0]
        edges.append(DfgEdge(m["id"], src, dst, dst_port, int(m["w"] or 0), src_port or OUT_PORT))
    return validate(nodes.values(), edges, name=name)


def format_dfg(dfg: Dfg) -> str:
    lines = [f"# {dfg.name}"] if dfg.name else []
    for n in dfg.nodes:
        default = 1 if n.kind.is_compute else 0
        lat = f" latency={n.latency}" if n.latency != default else ""
        lines.append(f"node {n.id} {n.kind}{lat}")
    for e in dfg.edges:
        delays = f" delays={e.w}" if e.w else ""
        lines.append(f"edge {e.id}: {e.src} -> {e.dst}.{e.dst_port}{delays}")
    return "\n".join(lines) + "\n"


def parse_folding_spec(text: str) -> FoldingSpec:
    factor = None
    units: dict[str, tuple[str | None, ...]] = {}
    stages: dict[str, int] = {}
    owner: dict[str, str] = {}
    for lineno, line, raw in _lines(text):
        parts = line.split()
        try:
            if parts[0] == "factor" and len(parts) == 2:
                factor = int(parts[1])
            elif parts[0] == "stages" and len(parts) == 3:
                stages[parts[1]] = int(parts[2])
            elif parts[0] == "unit" and len(parts) in (3, 4):
                uid = parts[1]
                if len(parts) == 4 and parts[2] != "order":
                    raise ValueError
                names = [p.strip() for p in parts[-1].split(",")]
                order = tuple(None if p == "_" else p for p in names)
                if uid in units:
                    raise FileSyntaxError(f"unit {uid} declared twice", lineno, raw)
                for nid in filter(None, order):
                    if nid in owner:
                        raise DuplicateNode(f"line {lineno}: node {nid} appears in both {owner[nid]} and {uid}")
                    owner[nid] = uid
                units[uid] = order
            else:
                raise ValueError
        except ValueError:
            raise FileSyntaxError(
                "expected 'factor <N>', 'unit <id> order <n1>,<n2>,...' or 'stages <kind> <P>'", lineno, raw
            ) from None
    if factor is None:
        raise FileSyntaxError("missing 'factor <N>' line")
    return FoldingSpec(factor, units, stages)


def parse_unit_assignment(text: str) -> dict[str, str]:
    """Node -> unit map from ``unit <id> [order] <n1>,<n2>`` lines; order is ignored."""
    assignment: dict[str, str] = {}
    for lineno, line, raw in _lines(text):
        parts = line.split()
        if parts[0] in ("factor", "stages"):
            continue
        if parts[0] != "unit" or len(parts) not in (3, 4):
            raise FileSyntaxError("expected 'unit <id> <n1>,<n2>,...'", lineno, raw)
        for nid in parts[-1].split(","):
            nid = nid.strip()
            if nid == "_":
                continue
            if nid in assignment:
                raise DuplicateNode(f"line {lineno}: node {nid} appears in both {assignment[nid]} and {parts[1]}")
            assignment[nid] = parts[1]
    return assignment


def format_folding_spec(spec: FoldingSpec) -> str:
    lines = [f"factor {spec.factor}"]
    for uid, order in spec.units.items():
        lines.append(f"unit {uid} order " + ",".join(n or "_" for n in order))
    for kind, p in sorted(spec.pipeline_stages.items()):
        lines.append(f"stages {kind} {p}")
    return "\n".join(lines) + "\n"


def bundled_path(name: str) -> Path:
    return Path(str(resources.files("dfgfold") / "data" / name))


def read_text(path: str | Path) -> str:
    """Read a file, falling back to the bundled data directory."""
    p = Path(path)
    if not p.exists():
        alt = bundled_path(p.name)
        if alt.exists():
            p = alt
    return p.read_text()


def load_dfg(path: str | Path) -> Dfg:
    return parse_dfg(read_text(path), name=Path(path).stem)


def load_folding_spec(path: str | Path) -> FoldingSpec:
    return parse_folding_spec(read_text(path))


def bundled_lpf() -> Dfg:
    """The bundled four-adder low-pass filter."""
    return load_dfg(bundled_path("paper_lpf.dfg"))


def bundled_spec() -> FoldingSpec:
    return load_folding_spec(bundled_path("paper.fold"))
