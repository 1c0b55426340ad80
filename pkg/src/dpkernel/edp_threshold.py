"""EDP on threshold graphs: drop free independent vertices past the first 4k+1
in descending-neighbourhood order, giving at most 7k+1 vertices."""
from __future__ import annotations

from dataclasses import dataclass

from .classes import NotSplit, NotThreshold, partition_for, threshold_order
from .core import Instance, KernelOutcome, RuleTrace, Solution, TriviallyNo, WorkGraph, emit, validate_instance
from .edp_split import PreconditionError, large_clique_witness


@dataclass(frozen=True)
class ThresholdTail:
    ordered_free: tuple  # neighbourhoods shrink along the tuple
    R: tuple


def kept_free(k: int) -> int:
    """How many free independent vertices survive."""
    return 4 * k + 1


def threshold_tail(inst: Instance, order) -> ThresholdTail:
    g = inst.graph
    free = [v for v in order.order if v not in inst.terminals]
    free.sort(key=lambda v: (-g.degree(v), v))
    for a, b in zip(free, free[1:]):
        assert g.adj[b] <= g.adj[a]
    keep = kept_free(inst.k)
    return ThresholdTail(tuple(free), tuple(free[keep:]))


def kernelize_threshold_edp(inst: Instance) -> KernelOutcome:
    sp = partition_for(inst)
    if isinstance(sp, NotSplit):
        raise PreconditionError("not a threshold graph: " + sp.reason)
    order = threshold_order(inst.graph, sp)
    if isinstance(order, NotThreshold):
        raise PreconditionError("not a threshold graph: " + order.reason)
    trace = RuleTrace()
    k, n = inst.k, inst.n
    if k == 0:
        return KernelOutcome("yes", trace=trace, witness=Solution((), "edp"), reason="no pairs")
    v = validate_instance(inst)
    if isinstance(v, TriviallyNo):
        trace.add("degree-check", n=(n, n), k=(k, k), note=v.reason)
        return KernelOutcome("no", trace=trace, reason=v.reason)
    if len(sp.C) >= k + 1:
        trace.add("large-clique", n=(n, n), k=(k, k), note=f"|C|={len(sp.C)} > k")
        return KernelOutcome("yes", trace=trace, witness=large_clique_witness(inst, sp),
                             reason="clique side larger than k")
    tail = threshold_tail(inst, order)
    wg = WorkGraph(inst.graph)
    if tail.R:
        wg.remove(tail.R)
        trace.add("threshold-tail", sorted(tail.R), n=(n, len(wg)), k=(k, k))
    red, mp = emit(wg, inst.pairs, "edp", clique=sp.C)
    trace.mapping = mp
    bound = 7 * k + 1
    info = {"sizes": {"V": (red.n, bound)}, "checks": {"V": red.n <= bound}}
    return KernelOutcome("reduced", red, trace, info=info)
