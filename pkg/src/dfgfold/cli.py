"""``dfgfold`` command-line front end.

Exit status: 0 success, 1 domain error, 2 usage error.  Graph and spec paths
that do not exist locally are looked up among the bundled files, so
``dfgfold fold paper_lpf.dfg --spec paper.fold`` works from any directory.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import cost, dfg as dfgmod, formats, lifetime, sim, stimulus, transforms
from .errors import DfgFoldError


def _fixed(args) -> sim.FixedPointConfig:
    return sim.FixedPointConfig.parse(args.fixed, args.overflow)


def _stim(args, default_length: int) -> stimulus.Stimulus:
    length = args.cycles if args.cycles is not None else default_length
    return stimulus.parse_stimulus(args.stimulus, length=length, seed=args.seed)


def cmd_validate(args, out):
    g = formats.load_dfg(args.dfg)
    out(f"ok: {len(g.nodes)} nodes, {len(g.edges)} edges")
    out(f"inputs: {', '.join(g.inputs)}")
    out(f"outputs: {', '.join(g.outputs)}")
    out(f"compute nodes: {', '.join(g.compute_nodes)}")
    out(f"delay registers: {g.total_delays}")


def cmd_critical_path(args, out):
    g = formats.load_dfg(args.dfg)
    path, length = dfgmod.critical_path(g)
    out(f"critical path: {' -> '.join(path) or '(none)'}")
    out(f"length: {length}")


def cmd_cutsets(args, out):
    g = formats.load_dfg(args.dfg)
    cuts = dfgmod.feedforward_cutsets(g, args.max)
    for cut in cuts:
        out("{" + ", ".join(cut) + "}")
    if not cuts:
        out("no feed-forward cut-set")


def cmd_pipeline(args, out):
    g = formats.load_dfg(args.dfg)
    ids = [e.strip() for e in args.cutset.split(",") if e.strip()]
    res = transforms.pipeline(g, ids, args.stages)
    before = dfgmod.critical_path(g)[1]
    after = dfgmod.critical_path(res.dfg)[1]
    out(f"inserted registers: {res.inserted_registers}")
    out(f"added latency: {res.added_latency}")
    out(f"critical path: {before} -> {after}")
    text = formats.format_dfg(res.dfg)
    if args.out:
        Path(args.out).write_text(text)
        out(f"wrote {args.out}")
    else:
        out("")
        out(text.rstrip("\n"))


def _describe(arch, c):
    return f"{c.edge}: {c.src} -> {c.dst}"


def cmd_fold(args, out):
    g = formats.load_dfg(args.dfg)
    spec = formats.load_folding_spec(args.spec)
    arch = transforms.fold(g, spec)
    out(f"folding factor: {arch.factor}")
    for uid in arch.units:
        out(f"unit {uid} ({arch.unit_op(uid)}): " + ", ".join(f"{n or '_'}@{k}" for k, n in enumerate(spec.units[uid])))
    for c in arch.connections:
        if c.role == "internal":
            out(f"D_F({_describe(arch, c)}) = {c.delay}")
    for c in arch.connections:
        if c.role != "internal":
            out(f"{c.role} {_describe(arch, c)}: slot {c.slot}, delay {c.delay}")
    for o, lat in arch.output_latency.items():
        out(f"output {o}: latency {lat} cycles ({lat // arch.factor} samples)")


def cmd_search_orders(args, out):
    g = formats.load_dfg(args.dfg)
    assignment = formats.parse_unit_assignment(formats.read_text(args.units))
    specs = transforms.search_folding_orders(g, args.factor, assignment)
    if not specs:
        out("no feasible ordering")
        return 1
    for spec in specs[: args.max]:
        delays = transforms.fold(g, spec).delays()
        orders = "; ".join(f"{u}={','.join(n or '_' for n in spec.units[u])}" for u in sorted(spec.units))
        out(f"{orders}  total_delay={sum(delays.values())}")


def cmd_lifetime(args, out):
    g = formats.load_dfg(args.dfg)
    arch = transforms.fold(g, formats.load_folding_spec(args.spec))
    table = lifetime.lifetime_table(arch)
    if args.csv:
        out(table.to_csv().rstrip("\n"))
        return
    out(table.to_text().rstrip("\n"))
    alloc = lifetime.allocate_registers(table)
    out("")
    out(f"max live: {lifetime.max_live(table)}")
    out(f"registers: {alloc.count}")
    for reg in range(alloc.count):
        out(f"R{reg}: {', '.join(alloc.holders(reg))}")


def cmd_simulate(args, out):
    g = formats.load_dfg(args.dfg)
    cfg = _fixed(args)
    stim = _stim(args, 32)
    # saturation is reported below as a count instead of a Python warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sim.SaturationWarning)
        if args.spec:
            arch = transforms.fold(g, formats.load_folding_spec(args.spec))
            trace = sim.simulate_folded(arch, stim, cfg)
        else:
            trace = sim.simulate_dfg(g, stim, cfg)
    if args.csv:
        Path(args.csv).write_text(trace.to_csv())
        out(f"wrote {args.csv}")
    for name in trace.outputs:
        lat = trace.latency(name)
        suffix = f" (latency {lat} samples)" if lat else ""
        out(f"{name}{suffix}: " + " ".join(f"{v:g}" for v in trace.values(name)))
    if trace.overflow_count:
        out(f"saturation events: {trace.overflow_count}")


def cmd_compare(args, out):
    g = formats.load_dfg(args.dfg)
    cfg = _fixed(args)
    stim = _stim(args, 1000)
    arch = transforms.fold(g, formats.load_folding_spec(args.spec))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sim.SaturationWarning)
        ref = sim.simulate_dfg(g, stim, cfg)
        cand = sim.simulate_folded(arch, stim, cfg)
    report = sim.equivalence_check(ref, cand)
    out(str(report))
    if ref.overflow_count or cand.overflow_count:
        out(f"saturation events: {ref.overflow_count} unfolded, {cand.overflow_count} folded")
    return 0 if report.equivalent else 1


def cmd_report(args, out):
    g = formats.load_dfg(args.before)
    arch = transforms.fold(g, formats.load_folding_spec(args.after_spec))
    table = None
    if args.cost_table:
        table = cost.CostTable.parse(formats.read_text(args.cost_table), source=Path(args.cost_table).name)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", cost.MissingWeight)
        rep = cost.cost_report(g, arch, table)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out(str(rep).rstrip("\n"))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dfgfold", description="Pipelining, folding and register analysis for DFGs.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    def sim_opts(sp, default_stim):
        sp.add_argument("--stimulus", default=default_stim, help="kind[:key=value,...], e.g. sine:freq=50")
        sp.add_argument("--cycles", type=int, help="number of input samples")
        sp.add_argument("--fixed", default="16.8", help="fixed-point format W.F (default 16.8)")
        sp.add_argument("--overflow", choices=("saturate", "wrap"), default="saturate")
        sp.add_argument("--seed", type=int, default=0)

    sp = add("validate", cmd_validate, "check a graph file")
    sp.add_argument("dfg")
    sp = add("critical-path", cmd_critical_path, "longest zero-delay path")
    sp.add_argument("dfg")
    sp = add("cutsets", cmd_cutsets, "enumerate feed-forward cut-sets")
    sp.add_argument("dfg")
    sp.add_argument("--max", type=int, default=50)
    sp = add("pipeline", cmd_pipeline, "insert registers along a cut-set")
    sp.add_argument("dfg")
    sp.add_argument("--cutset", required=True, help="comma-separated edge ids")
    sp.add_argument("--stages", type=int, default=1, help="registers per cut edge")
    sp.add_argument("--out", help="write the pipelined graph here")
    sp = add("fold", cmd_fold, "apply a folding spec and print folded delays")
    sp.add_argument("dfg")
    sp.add_argument("--spec", required=True)
    sp = add("search-orders", cmd_search_orders, "find feasible folding orders")
    sp.add_argument("dfg")
    sp.add_argument("--factor", type=int, required=True)
    sp.add_argument("--units", required=True, help="file with 'unit <id> <n1>,<n2>' lines")
    sp.add_argument("--max", type=int, default=20)
    sp = add("lifetime", cmd_lifetime, "lifetime table and register allocation")
    sp.add_argument("dfg")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--csv", action="store_true", help="print the table as CSV")
    sp = add("simulate", cmd_simulate, "simulate a graph, or its folded form with --spec")
    sp.add_argument("dfg")
    sp.add_argument("--spec")
    sim_opts(sp, "impulse")
    sp.add_argument("--csv", help="write the full trace as CSV")
    sp = add("compare", cmd_compare, "check folded vs unfolded simulation")
    sp.add_argument("dfg")
    sp.add_argument("--spec", required=True)
    sim_opts(sp, "random")
    sp = add("report", cmd_report, "structural cost comparison")
    sp.add_argument("before")
    sp.add_argument("after_spec")
    sp.add_argument("--cost-table")
    return p


def run_command(argv: list[str] | None = None, out=print) -> int:
    args = build_parser().parse_args(argv)
    try:
        status = args.fn(args, out)
    except (DfgFoldError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return status or 0


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
