"""Pipelining, folding and lifetime-based register minimization for
synchronous adder/shift dataflow graphs, with bit-exact simulation."""

from .dfg import CutSet, Dfg, DfgEdge, DfgNode, NodeKind, critical_path, feedforward_cutsets, validate
from .errors import DfgFoldError
from .formats import bundled_lpf, bundled_spec, load_dfg, load_folding_spec, parse_dfg, parse_folding_spec
from .lifetime import LifetimeTable, allocate_registers, lifetime_table, max_live
from .sim import FixedPointConfig, SimTrace, equivalence_check, simulate_dfg, simulate_folded
from .stimulus import Stimulus, gen_stimulus
from .transforms import FoldedArch, FoldingSpec, fold, folded_edge_delay, pipeline, search_folding_orders

__all__ = [
    "CutSet", "Dfg", "DfgEdge", "DfgFoldError", "DfgNode", "FixedPointConfig", "FoldedArch",
    "FoldingSpec", "LifetimeTable", "NodeKind", "SimTrace", "Stimulus", "allocate_registers",
    "critical_path", "equivalence_check", "feedforward_cutsets", "fold", "folded_edge_delay",
    "gen_stimulus", "lifetime_table", "load_dfg", "load_folding_spec", "max_live", "bundled_lpf",
    "bundled_spec", "parse_dfg", "parse_folding_spec", "pipeline", "search_folding_orders",
    "simulate_dfg", "simulate_folded", "validate",
]
