"""EDP on split graphs: the clique construction, preprocessing, the rich/poor
marking and the unmarked-vertex deletion rule."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

from .classes import NotSplit, SplitPartition, partition_for
from .core import (
    Instance,
    KernelOutcome,
    RuleTrace,
    Solution,
    TriviallyNo,
    WorkGraph,
    emit,
    norm_edge,
    validate_instance,
)
from .oracle import DEFAULT_BUDGET, Infeasible, check_solution, solve_exact


class PreconditionError(ValueError):
    pass


# ------------------------------------------------------------ clique solver

def _clique_paths(vertices: frozenset, occ: list) -> dict:
    """occ: list of (index, s, t). Returns index -> path, edge-disjoint,
    using only `vertices`; requires len(vertices) > len(occ)."""
    if not occ:
        return {}
    if len(occ) == 1:
        i, s, t = occ[0]
        return {i: (s, t)}
    mult = Counter(norm_edge(s, t) for _, s, t in occ)
    busy = {v for pair, c in mult.items() if c >= 2 for v in pair}
    v = min(vertices - busy)
    at_v = [o for o in occ if v in (o[1], o[2])]
    if at_v:
        rest = [o for o in occ if v not in (o[1], o[2])]
        out = _clique_paths(vertices - {v}, rest)
        for i, s, t in at_v:
            out[i] = (s, t)
        return out
    (i, s, t), rest = occ[0], occ[1:]
    out = _clique_paths(vertices - {v}, rest)
    out[i] = (s, v, t)
    return out


def clique_edp_construct(inst: Instance) -> Solution:
    g = inst.graph
    if inst.problem != "edp":
        raise PreconditionError("clique construction is for EDP")
    if g.m != g.n * (g.n - 1) // 2:
        raise PreconditionError("graph is not a clique")
    if g.n <= inst.k:
        raise PreconditionError(f"need more than k={inst.k} vertices, have {g.n}")
    paths = _clique_paths(frozenset(g.vertices()), [(i, s, t) for i, (s, t) in enumerate(inst.pairs)])
    return Solution(tuple(paths[i] for i in range(inst.k)), "edp")


def large_clique_witness(inst: Instance, sp: SplitPartition) -> Solution:
    """Solution for a split EDP instance with |C| > k and the degree condition:
    each independent-side terminal occurrence is moved to its own neighbour."""
    g = inst.graph
    if len(sp.C) <= inst.k:
        raise PreconditionError("clique side is not larger than k")
    slot: Counter = Counter()
    moved = []
    for s, t in inst.pairs:
        ends = []
        for x in (s, t):
            if x in sp.C:
                ends.append(x)
            else:
                nbrs = sorted(g.adj[x])
                ends.append(nbrs[slot[x]])
                slot[x] += 1
        moved.append(tuple(ends))
    inner = [(i, a, b) for i, (a, b) in enumerate(moved) if a != b]
    core = _clique_paths(frozenset(sp.C), inner)
    paths = []
    for i, ((s, t), (a, b)) in enumerate(zip(inst.pairs, moved)):
        mid = list(core[i]) if a != b else [a]
        if s not in sp.C:
            mid.insert(0, s)
        if t not in sp.C:
            mid.append(t)
        paths.append(tuple(mid))
    sol = Solution(tuple(paths), "edp")
    assert not check_solution(inst, sol), check_solution(inst, sol)
    return sol


# ------------------------------------------------------------------ marking

@dataclass
class SplitConstants:
    """Marking knobs; None means the default for the (padded) parameter k."""

    rich_target: int | None = None
    quota: int | None = None

    def resolve(self, k: int) -> tuple[int, int]:
        root = k ** 0.75
        r = self.rich_target if self.rich_target is not None else int(round(100 * root))
        q = self.quota if self.quota is not None else int(round(root))
        return max(r, 1), max(q, 1)

    @property
    def is_default(self) -> bool:
        return self.rich_target is None and self.quota is None


@dataclass
class SplitMarking:
    rich_target: int
    quota: int
    order: tuple
    A: dict = field(default_factory=dict)  # v -> list of clique vertices
    M_pair: dict = field(default_factory=dict)  # (v, x) -> frozenset
    M: frozenset = frozenset()
    U: frozenset = frozenset()
    rich: frozenset = frozenset()
    poor: frozenset = frozenset()

    def M_of(self, v) -> frozenset:
        return frozenset().union(*[s for (a, _), s in self.M_pair.items() if a == v])


def _mark(adj: dict, C, free, R: int, q: int) -> SplitMarking:
    order = tuple(sorted(C))
    U = set(free)
    mk = SplitMarking(R, q, order)
    M: set = set()
    rich, poor = set(), set()
    for v in order:
        A = []
        tentative = {}
        UT = set(U)
        for x in order:
            if len(A) >= R:
                break
            if x == v:
                continue
            common = adj[v] & adj[x] & UT
            if len(common) >= q:
                A.append(x)
                chosen = frozenset(sorted(common)[:q])
                tentative[(v, x)] = chosen
                UT -= chosen
        if len(A) >= R:
            rich.add(v)
            mk.A[v] = A
            mk.M_pair.update(tentative)
            for s in tentative.values():
                M |= s
            U = UT
        else:
            poor.add(v)
            mk.A[v] = A
    mk.M = frozenset(M)
    mk.U = frozenset(U)
    mk.rich = frozenset(rich)
    mk.poor = frozenset(poor)
    return mk


def mark_split_edp(inst: Instance, sp: SplitPartition, constants: SplitConstants | None = None) -> SplitMarking:
    constants = constants or SplitConstants()
    R, q = constants.resolve(inst.k)
    adj = {v: set(inst.graph.adj[v]) for v in inst.graph.vertices()}
    return _mark(adj, sp.C, sp.free_side(inst), R, q)


# ------------------------------------------------------------ preprocessing

def _n(wg):
    return len(wg)


def _cap_common_neighbours(wg: WorkGraph, C, free: set, k: int, trace: RuleTrace, kk: int):
    """Delete surplus common free neighbours of clique pairs.

    A vertex is only removed when every pair of its clique neighbours keeps
    more than 4k+1 common free neighbours, which makes the deletion safe:
    a path through it can be rerouted through an untouched common neighbour.
    """
    limit = 4 * k + 1
    adj = wg.adj
    while True:
        removed = None
        for u, w in combinations(sorted(C), 2):
            common = adj[u] & adj[w] & free
            if len(common) <= limit:
                continue
            for x in sorted(common, reverse=True):
                nb = sorted(adj[x] & C)
                if all(len(adj[a] & adj[b] & free) > limit for a, b in combinations(nb, 2)):
                    removed = (x, u, w)
                    break
            if removed:
                break
        if not removed:
            return
        x, u, w = removed
        n0 = _n(wg)
        wg.remove([x])
        free.discard(x)
        trace.add("common-neighbour-cap", [x], n=(n0, _n(wg)), k=(kk, kk), note=f"surplus of {u},{w}")


@dataclass
class _State:
    wg: WorkGraph
    C: set
    pairs: list
    free: set
    dummies: int = 0


def _preprocess(inst, sp, trace, oracle_below, budget):
    """Returns (KernelOutcome or None, _State)."""
    k = inst.k
    if k == 0:
        return KernelOutcome("yes", trace=trace, witness=Solution((), "edp"), reason="no pairs"), None
    v = validate_instance(inst)
    if isinstance(v, TriviallyNo):
        trace.add("degree-check", note=v.reason, n=(inst.n, inst.n), k=(k, k))
        return KernelOutcome("no", trace=trace, reason=v.reason), None
    if len(sp.C) > k:
        trace.add("large-clique", n=(inst.n, inst.n), k=(k, k), note=f"|C|={len(sp.C)} > k")
        return KernelOutcome("yes", trace=trace, witness=large_clique_witness(inst, sp),
                             reason="clique side larger than k"), None
    if k <= oracle_below:
        res = solve_exact(inst, budget)
        trace.add("small-k-oracle", n=(inst.n, inst.n), k=(k, k))
        if isinstance(res, Infeasible):
            return KernelOutcome("no", trace=trace, reason="oracle: infeasible"), None
        return KernelOutcome("yes", trace=trace, witness=res, reason="oracle"), None
    wg = WorkGraph(inst.graph)
    C = set(sp.C)
    free = set(sp.free_side(inst))
    pend = sorted(x for x in free if len(wg.adj[x]) <= 1)
    if pend:
        n0 = _n(wg)
        wg.remove(pend)
        free -= set(pend)
        trace.add("pendant", pend, n=(n0, _n(wg)), k=(k, k))
    _cap_common_neighbours(wg, C, free, k, trace, k)
    pairs = list(inst.pairs)
    root = math.ceil(round(k ** 0.25, 9))
    padded = root ** 4
    extra = padded - k
    if extra:
        anchor = min(C)
        n0 = _n(wg)
        new = []
        for _ in range(extra):
            a, b = wg.fresh(), wg.fresh()
            wg.add_edge(a, anchor)
            wg.add_edge(b, anchor)
            pairs.append((a, b))
            new.append((a, b))
        trace.add("pad-dummy-pairs", [x for p in new for x in p], new, n=(n0, _n(wg)), k=(k, padded),
                  note=f"anchor {anchor}")
    return None, _State(wg, C, pairs, free, extra)


def preprocess_split_edp(inst: Instance, sp: SplitPartition | None = None, oracle_below: int = 8,
                         budget: int = DEFAULT_BUDGET) -> KernelOutcome:
    sp = sp or _partition(inst)
    trace = RuleTrace()
    out, st = _preprocess(inst, sp, trace, oracle_below, budget)
    if out is not None:
        return out
    red, mp = emit(st.wg, st.pairs, "edp", clique=st.C)
    trace.mapping = mp
    return KernelOutcome("reduced", red, trace, info={"dummy_pairs": st.dummies})


def _partition(inst):
    sp = partition_for(inst)
    if isinstance(sp, NotSplit):
        raise PreconditionError("not a split graph: " + sp.reason)
    return sp


def kernelize_split_edp(inst: Instance, constants: SplitConstants | None = None, oracle_below: int = 8,
                        budget: int = DEFAULT_BUDGET) -> KernelOutcome:
    """Preprocess, then mark and delete unmarked free vertices without a poor
    neighbour until nothing changes."""
    constants = constants or SplitConstants()
    sp = _partition(inst)
    trace = RuleTrace()
    out, st = _preprocess(inst, sp, trace, oracle_below, budget)
    if out is not None:
        return out
    wg, C, free = st.wg, st.C, st.free
    k = len(st.pairs)
    R, q = constants.resolve(k)
    while True:
        mk = _mark(wg.adj, C, free, R, q)
        gone = sorted(u for u in mk.U if not (wg.adj[u] & mk.poor))
        if not gone:
            break
        n0 = _n(wg)
        wg.remove(gone)
        free -= set(gone)
        trace.add("unmarked-without-poor-neighbour", gone, n=(n0, _n(wg)), k=(k, k))
    red, mp = emit(wg, st.pairs, "edp", clique=C)
    trace.mapping = mp
    info = split_ledger(wg, C, free, st.pairs, mk, k, constants)
    info["dummy_pairs"] = st.dummies
    info["marking"] = mk
    return KernelOutcome("reduced", red, trace, info=info)


def split_ledger(wg, C, free, pairs, mk: SplitMarking, k: int, constants: SplitConstants) -> dict:
    """Component sizes of the reduced instance against their bounds."""
    terms = {v for p in pairs for v in p}
    I_T = {v for v in wg.adj if v not in C and v in terms}
    R, q = mk.rich_target, mk.quota
    poor_unmarked = max((len(wg.adj[v] & mk.U) for v in mk.poor), default=0)
    bounds = {
        "C": (len(C), k),
        "I_T": (len(I_T), 2 * k),
        "M": (len(mk.M), 100 * k ** 2.5 if constants.is_default else len(C) * R * q),
        "poor_unmarked": (poor_unmarked, 400 * k ** 1.75 + 100 * k ** 0.75 if constants.is_default
                          else (4 * k + 1) * R),
    }
    orphans = sorted(u for u in mk.U if not (wg.adj[u] & mk.poor))
    checks = {name: val <= bound for name, (val, bound) in bounds.items()}
    checks["unmarked_have_poor_neighbour"] = not orphans
    checks["vertex_sum"] = len(wg) == len(C) + len(I_T) + len(mk.U) + len(mk.M)
    return {"sizes": bounds, "checks": checks, "k": k}
