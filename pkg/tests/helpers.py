"""Independent oracles and random-input generators for the test suite.

Nothing here calls the code paths it is used to check: paths are
enumerated by plain DFS, occupancy is counted on unrolled copies, and so on.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random

from dfgfold.dfg import DfgEdge, DfgNode, NodeKind, validate


# ---------------------------------------------------------------- graphs

def make_graph(nodes, edges, name=""):
    """nodes: [(id, kind-string)], edges: [(id, src, dst, port, w)]."""
    return validate(
        [DfgNode(i, NodeKind.parse(k)) for i, k in nodes],
        [DfgEdge(e, s, d, p, w) for e, s, d, p, w in edges],
        name=name,
    )


def identity_graph(w=0):
    return make_graph([("IN", "input"), ("OUT", "output")], [("e", "IN", "OUT", "p0", w)])


def random_graph(rng: random.Random, max_compute=6, feedback=True, allow_negative_shift=True,
                 gain_prob=0.3, max_w=2):
    """Random single-input single-output adder/shift graph.

    Forward edges come from the input or an earlier node with 0..max_w
    delays; feedback edges (to the same or a later node) always carry at
    least one delay, so there is never a zero-delay loop.
    """
    k = rng.randint(1, max_compute)
    nodes = [("IN", "input")]
    kinds = []
    for i in range(k):
        if rng.random() < gain_prob:
            lo = -2 if allow_negative_shift else 0
            kinds.append(f"gain:{rng.randint(lo, 2)}")
        else:
            kinds.append("add")
        nodes.append((f"C{i}", kinds[-1]))
    nodes.append(("OUT", "output"))
    edges = []
    for i, kind in enumerate(kinds):
        ports = ("p0", "p1") if kind == "add" else ("p0",)
        for p in ports:
            if feedback and rng.random() < 0.2:
                src = f"C{rng.randint(i, k - 1)}"
                w = rng.randint(1, max_w)
            else:
                j = rng.randint(-1, i - 1)
                src = "IN" if j < 0 else f"C{j}"
                w = rng.randint(0, max_w)
            edges.append((f"e{len(edges)}", src, f"C{i}", p, w))
    edges.append(("y", f"C{k - 1}", "OUT", "p0", rng.randint(0, 1)))
    return make_graph(nodes, edges)


def random_units(rng: random.Random, dfg, factor):
    """Group compute nodes of one kind into units of at most ``factor`` nodes."""
    assignment = {}
    by_op = {}
    for nid in dfg.compute_nodes:
        by_op.setdefault(dfg.node(nid).kind.op, []).append(nid)
    for op, members in sorted(by_op.items()):
        rng.shuffle(members)
        size = rng.randint(1, factor)
        for g, start in enumerate(range(0, len(members), size)):
            for nid in members[start:start + size]:
                assignment[nid] = f"{op}{g}"
    return assignment


# ---------------------------------------------------------------- oracles

def brute_force_critical_path(dfg):
    """All simple zero-delay paths over compute nodes, longest then lexicographically smallest."""
    compute = set(dfg.compute_nodes)
    succ = {n: sorted({e.dst for e in dfg.edges if e.src == n and e.w == 0 and e.dst in compute}) for n in compute}
    paths = []
    stack = [[n] for n in compute]
    while stack:
        path = stack.pop()
        paths.append((sum(dfg.node(n).latency for n in path), path))
        for s in succ[path[-1]]:
            if s not in path:
                stack.append(path + [s])
    if not paths:
        return [], 0
    length, path = min(paths, key=lambda lp: (-lp[0], lp[1]))
    return path, length


def simple_paths(dfg):
    """Every simple input->output path as a list of edge ids."""
    out_nodes = set(dfg.outputs)
    paths = []

    def walk(node, seen, acc):
        if node in out_nodes:
            paths.append(list(acc))
            return
        for e in dfg.edges:
            if e.src == node and e.dst not in seen:
                acc.append(e.id)
                walk(e.dst, seen | {e.dst}, acc)
                acc.pop()

    for i in dfg.inputs:
        walk(i, {i}, [])
    return paths


def crosses_exactly_once(dfg, cut):
    paths = simple_paths(dfg)
    on_paths = {eid for p in paths for eid in p}
    if not cut or not set(cut) <= on_paths:
        return False
    return all(sum(eid in cut for eid in p) == 1 for p in paths)


def brute_force_cutsets(dfg):
    ids = sorted(e.id for e in dfg.edges)
    found = []
    for r in range(1, len(ids) + 1):
        for combo in itertools.combinations(ids, r):
            if crosses_exactly_once(dfg, set(combo)):
                found.append(frozenset(combo))
    return found


def brute_force_max_live(pairs, frame):
    """Count live copies per cycle on an explicitly unrolled schedule."""
    if not pairs:
        return 0
    if frame is None:
        copies = [(b, d) for b, d in pairs]
        lo = min(b for b, _ in pairs)
        hi = max(d for _, d in pairs)
        return max((sum(b <= t < d for b, d in copies) for t in range(lo, hi + 1)), default=0)
    span = max(abs(b) + abs(d) for b, d in pairs) // frame + 2
    copies = [(b + k * frame, d + k * frame) for b, d in pairs for k in range(-span, span + 1)]
    # any window of one frame is representative; take the one starting at 0
    return max(sum(b <= t < d for b, d in copies) for t in range(frame))


def dft_magnitude(h, f, fs):
    w = 2 * math.pi * f / fs
    return abs(sum(v * cmath.exp(-1j * w * n) for n, v in enumerate(h)))


def fitted_amplitude(y, f, fs):
    """Least-squares amplitude of a sinusoid of known frequency."""
    n = len(y)
    c = [math.cos(2 * math.pi * f * k / fs) for k in range(n)]
    s = [math.sin(2 * math.pi * f * k / fs) for k in range(n)]
    cc = sum(v * v for v in c)
    ss = sum(v * v for v in s)
    cs = sum(a * b for a, b in zip(c, s))
    yc = sum(a * b for a, b in zip(y, c))
    ys = sum(a * b for a, b in zip(y, s))
    det = cc * ss - cs * cs
    a = (yc * ss - ys * cs) / det
    b = (ys * cc - yc * cs) / det
    return math.hypot(a, b)
