"""Lifetime analysis and register allocation for folded architectures.

A variable occupies storage over the half-open window ``[birth, death)``, so
a value consumed in the cycle it is produced needs no register.  Folded
schedules repeat every N cycles: an interval stands for all of its shifted
copies ``[birth + kN, death + kN)``.
"""

from __future__ import annotations

import csv
import heapq
import io
from dataclasses import dataclass

from .transforms import FoldedArch

# Lifetimes as printed in the published lifetime table for the four-adder
# filter, kept verbatim as reference data.  They disagree with what the
# folded delays imply for A1/A0 (see lifetime_table), but give the same
# register count.
PUBLISHED_INTERVALS = {"A1": (1, 1), "A0": (2, 2), "A2": (1, 2), "A3": (2, 3)}
PUBLISHED_TERMS = {
    "A1": ("0+1", "0+1+0"),
    "A0": ("1+1", "1+1+0"),
    "A2": ("0+1", "0+1+1"),
    "A3": ("1+1", "1+1+1"),
}


@dataclass(frozen=True)
class LifetimeInterval:
    var: str
    birth: int
    death: int
    # human-readable provenance, e.g. ("0+1", "0+1+1")
    terms: tuple[str, str] | None = None

    def __post_init__(self):
        if self.death < self.birth:
            raise ValueError(f"{self.var}: death {self.death} precedes birth {self.birth}")

    @property
    def length(self) -> int:
        return self.death - self.birth


@dataclass(frozen=True)
class LifetimeTable:
    intervals: tuple[LifetimeInterval, ...]
    # None analyses a single iteration; otherwise the schedule repeats every `frame` cycles
    frame: int | None = None

    @classmethod
    def from_pairs(cls, pairs: dict[str, tuple[int, int]], frame: int | None = None) -> LifetimeTable:
        return cls(tuple(LifetimeInterval(v, b, d) for v, (b, d) in pairs.items()), frame)

    def __iter__(self):
        return iter(self.intervals)

    def to_text(self) -> str:
        rows = [("Nodes", "T_Input to T_Output", "T_Input to T_Output")]
        for k, iv in enumerate(self.intervals, 1):
            birth_t, death_t = iv.terms or (str(iv.birth), str(iv.death))
            rows.append((f"N{k} ({iv.var})", f"{birth_t} to {death_t}", f"{iv.birth} - {iv.death}"))
        widths = [max(len(r[i]) for r in rows) for i in range(3)]
        return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "t_input", "t_output"])
        for iv in self.intervals:
            w.writerow([iv.var, iv.birth, iv.death])
        return buf.getvalue()


def lifetime_table(arch: FoldedArch) -> LifetimeTable:
    """Birth at u + P (when the unit finishes), death after the longest folded delay out."""
    dfg = arch.dfg
    longest: dict[str, int] = {}
    for c in arch.connections:
        if c.src_unit is not None:
            longest[c.src] = max(longest.get(c.src, 0), c.delay)
    intervals = []
    for uid in arch.units:
        for u, nid in enumerate(arch.spec.units[uid]):
            if nid is None:
                continue
            p = arch.spec.stages(dfg.node(nid).kind.op)
            d = longest.get(nid, 0)
            intervals.append(LifetimeInterval(nid, u + p, u + p + d, (f"{u}+{p}", f"{u}+{p}+{d}")))
    return LifetimeTable(tuple(intervals), arch.factor)


def _live_count(iv: LifetimeInterval, t: int, frame: int | None) -> int:
    if frame is None:
        return int(iv.birth <= t < iv.death)
    # copies k with birth + k*frame <= t < death + k*frame
    return (t - iv.birth) // frame - (t - iv.death) // frame


def occupancy(table: LifetimeTable) -> dict[int, int]:
    """Live-variable count per cycle (one frame for periodic tables)."""
    stored = [iv for iv in table if iv.length > 0]
    if table.frame is None:
        if not stored:
            return {}
        times = range(min(iv.birth for iv in stored), max(iv.death for iv in stored))
    else:
        times = range(table.frame)
    return {t: sum(_live_count(iv, t, table.frame) for iv in stored) for t in times}


def max_live(table: LifetimeTable) -> int:
    return max(occupancy(table).values(), default=0)


@dataclass(frozen=True)
class RegisterAllocation:
    """Register index per stored variable.

    For periodic tables successive iterations of a variable may rotate
    through registers; ``assignment[var]`` then lists the register used by
    iteration ``k`` at position ``k % period``.
    """

    assignment: dict[str, tuple[int, ...]]
    count: int
    period: int = 1

    def register_of(self, var: str, iteration: int = 0) -> int:
        regs = self.assignment[var]
        return regs[iteration % len(regs)]

    def holders(self, register: int) -> list[str]:
        return [v for v, regs in self.assignment.items() if register in regs]


def _left_edge(events):
    """Lowest-free-register assignment over (birth, death, key) sorted by birth then key."""
    free: list[int] = []
    busy: list[tuple[int, int]] = []  # (death, register)
    next_reg = 0
    result = {}
    for birth, death, key in events:
        while busy and busy[0][0] <= birth:
            heapq.heappush(free, heapq.heappop(busy)[1])
        if free:
            reg = heapq.heappop(free)
        else:
            reg, next_reg = next_reg, next_reg + 1
        result[key] = reg
        heapq.heappush(busy, (death, reg))
    return result


def allocate_registers(table: LifetimeTable, max_frames: int = 100_000) -> RegisterAllocation:
    """First-fit (left-edge) allocation; zero-length lifetimes get no register.

    Intervals are taken in order of birth, then variable id, and each gets
    the lowest-numbered free register.  Periodic tables are run frame by
    frame from reset until the allocator state recurs, so the register count
    equals ``max_live`` even when lifetimes wrap around the frame.
    """
    stored = sorted((iv for iv in table if iv.length > 0), key=lambda iv: (iv.birth, iv.var))
    if not stored:
        return RegisterAllocation({}, 0)
    if table.frame is None:
        got = _left_edge((iv.birth, iv.death, iv.var) for iv in stored)
        return RegisterAllocation({v: (r,) for v, r in got.items()}, len(set(got.values())))

    frame = table.frame
    # iteration j of a variable is born in frame j + q
    q = {iv.var: iv.birth // frame for iv in stored}
    warm = max(0, max(q.values())) + 1
    free: list[int] = []
    busy: list[tuple[int, int, str, int]] = []  # (death, register, var, iteration)
    next_reg = 0
    got: dict[tuple[str, int], int] = {}
    seen: dict = {}
    for k in range(max_frames):
        t = k * frame
        while busy and busy[0][0] <= t:
            heapq.heappush(free, heapq.heappop(busy)[1])
        if k >= warm:
            # the allocator's future depends only on this state
            state = (frozenset((v, j - k, r) for _, r, v, j in busy), next_reg)
            if state in seen:
                k0 = seen[state]
                period = k - k0
                assignment = {}
                for iv in stored:
                    first = k0 - q[iv.var]
                    window = {j % period: got[(iv.var, j)] for j in range(first, first + period)}
                    assignment[iv.var] = tuple(window[p] for p in range(period))
                used = {r for regs in assignment.values() for r in regs}
                return RegisterAllocation(assignment, len(used), period)
            seen[state] = k
        arrivals = sorted(
            (iv.birth + j * frame, iv.var, j, iv.death + j * frame)
            for iv in stored
            if (j := k - q[iv.var]) >= 0
        )
        for birth, var, j, death in arrivals:
            while busy and busy[0][0] <= birth:
                heapq.heappush(free, heapq.heappop(busy)[1])
            if free:
                reg = heapq.heappop(free)
            else:
                reg, next_reg = next_reg, next_reg + 1
            got[(var, j)] = reg
            heapq.heappush(busy, (death, reg, var, j))
    raise RuntimeError(f"register assignment did not settle within {max_frames} frames")
