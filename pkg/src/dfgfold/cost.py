"""Structural cost comparison between an unfolded graph and its folded form.

Counts are computed from the designs.  Published synthesis figures are
carried as labelled reference constants only; they depend on a cell library
and bit width this toolkit does not model.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

from .dfg import Dfg
from .errors import DfgFoldError
from .lifetime import allocate_registers, lifetime_table
from .transforms import FoldedArch

ROLES = ("adder", "register", "mux")

# Per-instance standard-cell areas [um^2] from the published netlist breakdown:
# ADDFX1 551.0232/28, DFFQX1 1382.8563/87, MX2X1 422.3502/62.
PUBLISHED_CELL_AREA = {"adder": 551.0232 / 28, "register": 1382.8563 / 87, "mux": 422.3502 / 62}

# Published post-layout results; never recomputed here.
REFERENCE_FIGURES = (
    ("adder cell area [um^2]", "1067.229 -> 551.0232 (48.37% reduction)"),
    ("adder instances", "55 -> 28"),
    ("standard cells", "452 -> 1361"),
    ("total power", "0.7575 mW"),
    ("total cell area [um^2]", "7493.310"),
)


class MissingWeight(DfgFoldError, UserWarning):
    pass


@dataclass(frozen=True)
class CostTable:
    weights: dict[str, float] = field(default_factory=lambda: dict(PUBLISHED_CELL_AREA))
    unit: str = "um^2"
    source: str = "reference cell areas (published synthesis)"

    def __post_init__(self):
        bad = {k: v for k, v in self.weights.items() if v < 0}
        if bad:
            raise DfgFoldError(f"negative cost weights: {bad}")

    @classmethod
    def parse(cls, text: str, source: str = "user table") -> CostTable:
        """``role weight`` or ``role,weight`` lines; ``# unit <name>`` sets the unit label."""
        weights = {}
        unit = ""
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if line.startswith("# unit"):
                unit = line[len("# unit") :].strip()
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise DfgFoldError(f"cost table line {lineno}: expected '<role> <weight>'")
            try:
                weights[parts[0]] = float(parts[1])
            except ValueError:
                raise DfgFoldError(f"cost table line {lineno}: bad weight {parts[1]!r}") from None
        return cls(weights, unit, source)


@dataclass
class CostReport:
    name: str
    before: dict[str, int]
    after: dict[str, int]
    lifetime_registers: int
    weighted: tuple[float, float] | None
    table: CostTable | None

    @staticmethod
    def reduction(before: float, after: float) -> float:
        return 0.0 if before == 0 else 100.0 * (before - after) / before

    def lines(self) -> list[str]:
        out = []
        if self.name:
            out.append(f"design: {self.name}")
        for key, label in (("adder", "adders"), ("gain", "gains"), ("register", "delay registers"), ("mux", "muxes")):
            b, a = self.before[key], self.after[key]
            pct = f" ({self.reduction(b, a):.2f}% reduction)" if b else ""
            out.append(f"{label}: {b} -> {a}{pct}")
        out.append(f"lifetime registers: {self.lifetime_registers}")
        if self.weighted is not None:
            b, a = self.weighted
            out.append(
                f"weighted area [{self.table.unit}]: {b:.4f} -> {a:.4f} "
                f"({self.reduction(b, a):.2f}% reduction; weights: {self.table.source})"
            )
        else:
            out.append("weighted area: unavailable (missing weights)")
        for label, value in REFERENCE_FIGURES:
            out.append(f"reference {label} (published synthesis, not computed): {value}")
        return out

    def csv_block(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["design", "metric", "value"])
        for design, counts in (("before", self.before), ("after", self.after)):
            for k, v in counts.items():
                w.writerow([design, k, v])
        w.writerow(["after", "lifetime_registers", self.lifetime_registers])
        if self.weighted is not None:
            w.writerow(["before", "weighted_area", f"{self.weighted[0]:.4f}"])
            w.writerow(["after", "weighted_area", f"{self.weighted[1]:.4f}"])
        return buf.getvalue()

    def __str__(self) -> str:
        return "\n".join(self.lines()) + "\n\n" + self.csv_block()


def _mux_count(arch: FoldedArch) -> int:
    """2:1 multiplexers in front of unit in-ports that see several sources."""
    sources: dict[tuple[str, str], set] = {}
    for c in arch.connections:
        if c.dst_unit is None:
            continue
        src = c.src_unit or c.src
        sources.setdefault((c.dst_unit, c.dst_port), set()).add((src, c.delay))
    return sum(len(s) - 1 for s in sources.values())


def _input_registers(arch: FoldedArch) -> int:
    # one tapped delay line per external input, as deep as its longest tap
    depth: dict[str, int] = {}
    for c in arch.connections:
        if c.role in ("input",) or (c.role == "output" and c.src_unit is None):
            depth[c.src] = max(depth.get(c.src, 0), c.delay)
    return sum(depth.values())


def cost_report(before: Dfg, after: FoldedArch, table: CostTable | None = None) -> CostReport:
    """Compare unit and register counts, optionally weighted by cell area."""
    table = CostTable() if table is None else table
    kinds = [before.node(n).kind.op for n in before.compute_nodes]
    before_counts = {
        "adder": kinds.count("add"),
        "gain": kinds.count("gain"),
        "register": before.total_delays,
        "mux": 0,
    }
    alloc = allocate_registers(lifetime_table(after))
    unit_ops = [after.unit_op(u) for u in after.units if any(after.spec.units[u])]
    after_counts = {
        "adder": unit_ops.count("add"),
        "gain": unit_ops.count("gain"),
        "register": alloc.count + _input_registers(after),
        "mux": _mux_count(after),
    }

    missing = [r for r in ROLES if r not in table.weights]
    weighted = None
    if missing:
        warnings.warn(MissingWeight(f"cost table lacks weights for {', '.join(missing)}; reporting counts only"))
        table = None
    else:
        wt = table.weights

        def area(c):
            return c["adder"] * wt["adder"] + c["register"] * wt["register"] + c["mux"] * wt["mux"]

        weighted = (area(before_counts), area(after_counts))
    return CostReport(before.name, before_counts, after_counts, alloc.count, weighted, table)
