"""Walk the bundled four-adder filter through every stage of the toolkit.

    python scripts/walkthrough.py
"""

from dfgfold import (
    allocate_registers,
    bundled_lpf,
    bundled_spec,
    critical_path,
    equivalence_check,
    feedforward_cutsets,
    fold,
    lifetime_table,
    max_live,
    pipeline,
    simulate_dfg,
    simulate_folded,
)
from dfgfold.cost import cost_report
from dfgfold.stimulus import Stimulus


def main():
    g = bundled_lpf()
    path, length = critical_path(g)
    print(f"critical path: {' -> '.join(path)} ({length})")

    print("\nfeed-forward cut-sets:")
    for cut in feedforward_cutsets(g, max_results=10):
        res = pipeline(g, cut)
        print(f"  {{{', '.join(cut)}}}: critical path -> {critical_path(res.dfg)[1]}")

    spec = bundled_spec()
    arch = fold(g, spec)
    print("\nfolded delays:", arch.delays(), "| output latency:", arch.output_latency)

    table = lifetime_table(arch)
    print("\n" + table.to_text())
    alloc = allocate_registers(table)
    print(f"max live {max_live(table)}, registers {alloc.count}")

    stim = Stimulus("random", length=2000, amplitude=4, seed=1)
    print("\n" + str(equivalence_check(simulate_dfg(g, stim), simulate_folded(arch, stim))))
    print("\n" + str(cost_report(g, arch)))


if __name__ == "__main__":
    main()
