"""VDP on split graphs: the auxiliary matching over free independent vertices,
the clean-up step, and the rules turning the instance into one where every
vertex lies in at most one pair."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .classes import NotSplit, is_split_partition, partition_for
from .core import Instance, KernelOutcome, RuleTrace, Solution, TriviallyNo, WorkGraph, emit, norm_edge, validate_instance
from .edp_split import PreconditionError
from .oracle import DEFAULT_BUDGET, BudgetExceeded, Infeasible, solve_exact

UNIQUE_MARK = "vdp-unique: true"


@dataclass(frozen=True)
class AuxBipartite:
    """A side: one copy ((s, t), j) per surplus occurrence of a heavy clique
    pair. B side: the free independent vertices."""

    copies: tuple
    free: tuple
    edges: dict  # copy index -> tuple of free vertices
    matching: dict  # copy index -> free vertex

    @property
    def saturated(self) -> tuple:
        """The matched pairs, as a multiset in copy order."""
        return tuple(self.copies[i][0] for i in sorted(self.matching))


def _max_matching(n_left: int, edges: dict) -> dict:
    match_r: dict = {}

    def augment(i, seen):
        for x in edges[i]:
            if x in seen:
                continue
            seen.add(x)
            if x not in match_r or augment(match_r[x], seen):
                match_r[x] = i
                return True
        return False

    for i in range(n_left):
        augment(i, set())
    return {i: x for x, i in match_r.items()}


def has_augmenting_path(aux: AuxBipartite) -> bool:
    """Alternating BFS from every unmatched copy."""
    match_r = {x: i for i, x in aux.matching.items()}
    frontier = [i for i in range(len(aux.copies)) if i not in aux.matching]
    seen_left = set(frontier)
    seen_right: set = set()
    while frontier:
        nxt = []
        for i in frontier:
            for x in aux.edges[i]:
                if x in seen_right or aux.matching.get(i) == x:
                    continue
                seen_right.add(x)
                if x not in match_r:
                    return True
                j = match_r[x]
                if j not in seen_left:
                    seen_left.add(j)
                    nxt.append(j)
        frontier = nxt
    return False


def _heavy_clique_pairs(pairs, C) -> Counter:
    mult = Counter(norm_edge(s, t) for s, t in pairs)
    return Counter({e: w for e, w in mult.items() if w >= 2 and e[0] in C and e[1] in C})


def _construction(adj: dict, pairs, C, free) -> AuxBipartite:
    heavy = _heavy_clique_pairs(pairs, C)
    copies = tuple((e, j) for e in sorted(heavy) for j in range(1, heavy[e]))
    free = tuple(sorted(free))
    edges = {
        i: tuple(x for x in free if s in adj[x] and t in adj[x])
        for i, ((s, t), _) in enumerate(copies)
    }
    aux = AuxBipartite(copies, free, edges, _max_matching(len(copies), edges))
    assert not has_augmenting_path(aux)
    return aux


def construction_a(inst: Instance, sp=None) -> AuxBipartite:
    sp = sp or _partition(inst)
    free = sp.I - inst.terminals
    return _construction(inst.graph.adj, inst.pairs, sp.C, free)


def _partition(inst: Instance):
    sp = partition_for(inst)
    if isinstance(sp, NotSplit):
        raise PreconditionError("not a split graph: " + sp.reason)
    return sp


class _State:
    def __init__(self, inst: Instance, C):
        self.wg = WorkGraph(inst.graph)
        self.pairs = list(inst.pairs)
        self.C = set(C)
        self.trace = RuleTrace()

    @property
    def k(self) -> int:
        return len(self.pairs)

    def terminals(self) -> set:
        return {v for p in self.pairs for v in p}

    def drop(self, vs):
        self.wg.remove(vs)
        self.C -= set(vs)

    def emit(self) -> Instance:
        inst, mp = emit(self.wg, self.pairs, "vdp", clique=self.C)
        self.trace.mapping = mp
        return inst


def _clean_up(st: _State) -> AuxBipartite:
    free = set(st.wg.adj) - st.C - st.terminals()
    aux = _construction(st.wg.adj, st.pairs, st.C, free)
    sat = Counter(aux.saturated)
    if not free and not sat:
        return aux
    n0, k0 = len(st.wg), st.k
    kept, removed = [], []
    for s, t in st.pairs:
        e = norm_edge(s, t)
        if sat[e]:
            sat[e] -= 1
            removed.append((s, t))
        else:
            kept.append((s, t))
    st.pairs = kept
    st.drop(free)
    st.trace.add("clean-up", sorted(free), removed, n=(n0, len(st.wg)), k=(k0, st.k),
                 note=f"matching size {len(aux.matching)}")
    return aux


def clean_up(inst: Instance) -> Instance:
    st = _State(inst, _partition(inst).C)
    _clean_up(st)
    return st.emit()


def rr1_cut(wg: WorkGraph, s: int, t: int):
    """The graph edit of RR1: the edge of the solved pair goes away."""
    wg.remove_edge(s, t)


def _rr1(st: _State) -> bool:
    for i, (s, t) in enumerate(st.pairs):
        if (s in st.C) != (t in st.C) and st.wg.has_edge(s, t):
            n0, k0 = len(st.wg), st.k
            rr1_cut(st.wg, s, t)
            del st.pairs[i]
            left = st.terminals()
            gone = [x for x in (s, t) if x not in left]
            st.drop(gone)
            st.trace.add("RR1", [s, t], [(s, t)], n=(n0, len(st.wg)), k=(k0, st.k))
            return True
    return False


def _rr2(st: _State) -> bool:
    heavy = _heavy_clique_pairs(st.pairs, st.C)
    if not heavy:
        return False
    e = min(heavy)
    w = heavy[e]
    n0 = len(st.wg)
    clique = sorted(st.C)
    idx = [i for i, p in enumerate(st.pairs) if norm_edge(*p) == e][1:]
    firsts = [st.wg.fresh() for _ in idx]
    seconds = [st.wg.fresh() for _ in idx]
    for i, a, b in zip(idx, firsts, seconds):
        for c in clique:
            st.wg.add_edge(a, c)
            st.wg.add_edge(b, c)
        s, t = st.pairs[i]
        st.pairs[i] = (a, b) if s == e[0] else (b, a)
    st.trace.add("RR2", list(e), [e] * (w - 1), n=(n0, len(st.wg)), k=(st.k, st.k),
                 note=f"weight {w}, copies {firsts + seconds}")
    return True


def _rr3(st: _State) -> bool:
    occ = Counter(v for p in st.pairs for v in p)
    multi = sorted(v for v, c in occ.items() if c >= 2)
    if not multi:
        return False
    v = multi[0]
    n0 = len(st.wg)
    nb = set(st.wg.adj[v])
    in_clique = v in st.C
    copies = []
    for i, (s, t) in enumerate(st.pairs):
        if v in (s, t):
            c = st.wg.fresh()
            copies.append(c)
            st.pairs[i] = (c, t) if s == v else (s, c)
    for c in copies:
        for u in nb:
            st.wg.add_edge(c, u)
    if in_clique:
        for a in copies:
            for b in copies:
                st.wg.add_edge(a, b)
        st.C.update(copies)
    st.drop([v])
    st.trace.add("RR3", [v], n=(n0, len(st.wg)), k=(st.k, st.k),
                 note=f"{len(copies)} copies {copies}" + (" in clique" if in_clique else ""))
    return True


def _unique_rules(st: _State):
    while _rr1(st) or _rr2(st) or _rr3(st):
        pass


def to_vdp_unique(inst: Instance) -> Instance:
    st = _State(inst, _partition(inst).C)
    _unique_rules(st)
    return st.emit()


def unique_ledger(inst: Instance) -> dict:
    occ = inst.occurrences
    mult = inst.pair_multiplicity
    C = inst.clique or frozenset()
    checks = {
        "one_pair_per_vertex": all(c <= 1 for c in occ.values()),
        "no_heavy_edges": not any(w >= 2 and inst.graph.has_edge(*e) for e, w in mult.items()),
        "mixed_pairs_nonadjacent": not any(
            (s in C) != (t in C) and inst.graph.has_edge(s, t) for s, t in inst.pairs),
        "split": is_split_partition(inst.graph, C),
    }
    return {"sizes": {"V": (inst.n, None)}, "checks": checks}


def kernelize_split_vdp(inst: Instance, resolve: bool = False, budget: int = DEFAULT_BUDGET) -> KernelOutcome:
    if inst.problem != "vdp":
        raise PreconditionError("pipeline is for VDP")
    sp = _partition(inst)
    trace = RuleTrace()
    if inst.k == 0:
        return KernelOutcome("yes", trace=trace, witness=Solution((), "vdp"), reason="no pairs")
    v = validate_instance(inst)
    if isinstance(v, TriviallyNo):
        trace.add("degree-check", n=(inst.n, inst.n), k=(inst.k, inst.k), note=v.reason)
        return KernelOutcome("no", trace=trace, reason=v.reason)
    st = _State(inst, sp.C)
    _clean_up(st)
    _unique_rules(st)
    red = st.emit()
    if st.k == 0:
        return KernelOutcome("yes", trace=st.trace, reason="every pair settled by clean-up and RR1")
    info = unique_ledger(red)
    info["comments"] = [UNIQUE_MARK]
    if not resolve:
        return KernelOutcome("reduced", red, st.trace, info=info)
    try:
        r = solve_exact(red, budget)
    except BudgetExceeded:
        info["resolve"] = "budget"
        return KernelOutcome("reduced", red, st.trace, reason="oracle budget exceeded", info=info)
    status = "no" if isinstance(r, Infeasible) else "yes"
    info["resolve"] = status
    return KernelOutcome(status, red, st.trace, reason="unique instance solved exactly", info=info)
