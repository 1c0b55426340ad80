"""VDP on well-partitioned chordal graphs: light-pair removal, boundary
marking along valid paths, bypassing of pass-through bags, and the final
deletion of unmarked vertices."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .classes import validate_partition_tree
from .core import Instance, KernelOutcome, Ok, PartitionTree, RuleTrace, Solution, TriviallyNo, WorkGraph, emit, norm_edge, validate_instance
from .edp_split import PreconditionError


class _State:
    """Working graph, pairs and bag tree under working labels."""

    def __init__(self, inst: Instance, pt: PartitionTree):
        self.wg = WorkGraph(inst.graph)
        self.pairs = list(inst.pairs)
        self.bags = {b: set(vs) for b, vs in pt.bags}
        self.tadj = {b: set(nb) for b, nb in pt.tree_adj.items()}
        self.trace = RuleTrace()

    @property
    def k(self) -> int:
        return len(self.pairs)

    def terminals(self) -> set:
        return {v for p in self.pairs for v in p}

    def bag_of(self) -> dict:
        return {v: b for b, vs in self.bags.items() for v in vs}

    def bd(self, x, y) -> frozenset:
        ys = self.bags[y]
        return frozenset(v for v in self.bags[x] if self.wg.adj[v] & ys)

    def mult(self) -> Counter:
        return Counter(norm_edge(s, t) for s, t in self.pairs)

    def heavy(self, s, t, mult=None) -> bool:
        mult = mult or self.mult()
        return self.wg.has_edge(s, t) and mult[norm_edge(s, t)] >= 2

    def delete(self, vs):
        self.wg.remove(vs)
        for b in self.bags.values():
            b.difference_update(vs)

    def drop_bag(self, b):
        """Remove bag b; its other tree neighbours hang off its first one."""
        nbs = sorted(self.tadj.pop(b))
        for x in nbs:
            self.tadj[x].discard(b)
        for x in nbs[1:]:
            self.tadj[x].add(nbs[0])
            self.tadj[nbs[0]].add(x)
        self.delete(self.bags.pop(b))

    def tree(self) -> PartitionTree:
        return PartitionTree.build(self.bags, [(a, b) for a in self.tadj for b in self.tadj[a] if a < b])

    def instance(self) -> Instance:
        g, mp = self.wg.freeze()
        return Instance(g, tuple((mp[s], mp[t]) for s, t in self.pairs), "vdp")


def _tree_path(tadj: dict, a, b) -> tuple:
    parent = {a: None}
    frontier = [a]
    while frontier and b not in parent:
        nxt = []
        for x in frontier:
            for y in sorted(tadj[x]):
                if y not in parent:
                    parent[y] = x
                    nxt.append(y)
        frontier = nxt
    if b not in parent:
        raise PreconditionError(f"bags {a} and {b} are not connected in the tree")
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def valid_path(pt: PartitionTree, pair) -> tuple:
    """Bag sequence from the bag of the first terminal to that of the second."""
    s, t = pair
    bo = pt.bag_of
    path = _tree_path(pt.tree_adj, bo[s], bo[t])
    assert s in pt.bag_map[path[0]] and t in pt.bag_map[path[-1]]
    return path


# ---------------------------------------------------------------- boundaries

@dataclass(frozen=True)
class BoundaryIndex:
    """Boundaries of tree-adjacent bags. `count` holds, per ordered active
    pair (B, B'), how many non-heavy occurrences activate it."""

    bd: dict
    count: dict
    tilde: dict
    shared: dict
    paths: dict  # non-heavy occurrence index -> valid path

    def active_at(self, b) -> list:
        return sorted(y for x, y in self.count if x == b)

    def load(self, b) -> int:
        return sum(c for (x, _), c in self.count.items() if x == b)


def _index(st: _State) -> BoundaryIndex:
    bo = st.bag_of()
    bd = {(x, y): st.bd(x, y) for x in st.tadj for y in st.tadj[x]}
    mult = st.mult()
    count: Counter = Counter()
    paths = {}
    for i, (s, t) in enumerate(st.pairs):
        if st.heavy(s, t, mult):
            continue
        p = _tree_path(st.tadj, bo[s], bo[t])
        paths[i] = p
        for x, y in zip(p, p[1:]):
            count[(x, y)] += 1
            count[(y, x)] += 1
    tilde, shared = {}, {}
    for x, y in count:
        others = set()
        for z in st.tadj[x]:
            if z != y and (x, z) in count:
                others |= bd[(x, z)]
        tilde[(x, y)] = bd[(x, y)] - others
        shared[(x, y)] = bd[(x, y)] - tilde[(x, y)]
    return BoundaryIndex(bd, dict(count), tilde, shared, paths)


def active_boundaries(inst: Instance, pt: PartitionTree) -> BoundaryIndex:
    return _index(_State(inst, pt))


# ------------------------------------------------------------------- marking

@dataclass
class WpcMarking:
    index: BoundaryIndex
    boundary_marks: dict  # active (B, B') -> marked vertices of bd(B, B')
    per_occurrence: dict  # non-heavy occurrence index -> M_(s,t)
    per_heavy: dict  # heavy edge -> M_(s,t)
    rebalanced: list = field(default_factory=list)
    surplus: dict = field(default_factory=dict)  # bag -> vertices kept in shared sets without rebalancing

    @property
    def m1(self) -> frozenset:
        return frozenset(v for s in self.per_occurrence.values() for v in s)

    @property
    def m2(self) -> frozenset:
        return frozenset(v for s in self.per_heavy.values() for v in s)

    def forest(self, st_bags: dict, tadj: dict) -> dict:
        m1 = self.m1
        keep = {b for b, vs in st_bags.items() if vs & m1}
        return {b: {y for y in tadj[b] if y in keep} for b in keep}


def tilde_quota_met(tilde: frozenset, need: int) -> bool:
    """Step deciding between a quota from the private part of a boundary and
    marking the whole boundary."""
    return len(tilde) >= need


def _pick(cands, size, avoid=frozenset()):
    return frozenset(sorted(cands, key=lambda v: (v in avoid, v))[:size])


def _allocate(F: list, wants: dict, bd: dict, B) -> dict | None:
    """Distinct vertices of F, wants[j] of them inside bd(B, j) for every j,
    or None when that is impossible."""
    slots = [j for j in sorted(wants) for _ in range(wants[j])]
    owner: dict = {}

    def augment(si, seen):
        for v in F:
            if v in seen or v not in bd[(B, slots[si])]:
                continue
            seen.add(v)
            if v not in owner or augment(owner[v], seen):
                owner[v] = si
                return True
        return False

    for si in range(len(slots)):
        if not augment(si, set()):
            return None
    out: dict = {j: set() for j in wants}
    for v, si in owner.items():
        out[slots[si]].add(v)
    return out


def _mark(st: _State) -> WpcMarking:
    k = st.k
    idx = _index(st)
    vx = st.terminals()
    bm = {}
    for (B, Bi), c in sorted(idx.count.items()):
        tl = idx.tilde[(B, Bi)]
        if tilde_quota_met(tl, 2 * c):
            bm[(B, Bi)] = _pick(tl - vx, 2 * c)
        else:
            bm[(B, Bi)] = idx.bd[(B, Bi)]
    m1_now = frozenset(v for s in bm.values() for v in s)

    bo = st.bag_of()
    mult = st.mult()
    per_heavy = {}
    taken = set(m1_now)
    for e in sorted(mult):
        s, t = e
        if not st.heavy(s, t, mult):
            continue
        bs, bt = bo[s], bo[t]
        if bs != bt:
            cands = idx.bd[(bs, bt)] | idx.bd[(bt, bs)]
        else:
            cands = set(st.bags[bs])
            for y in st.tadj[bs]:
                if {s, t} <= idx.bd[(bs, y)]:
                    cands |= idx.bd[(y, bs)]
        per_heavy[e] = _pick(set(cands) - vx, 2 * k, taken)
        taken |= per_heavy[e]

    rebalanced = []
    surplus: dict = {}
    bm = {key: set(v) for key, v in bm.items()}
    for B in sorted(st.bags):
        act = idx.active_at(B)
        for Bi in act:
            F = idx.shared[(B, Bi)]
            if not F:
                continue
            js = [j for j in act if F & idx.bd[(B, j)]]
            wants = {j: 2 * idx.count[(B, j)] for j in js}
            alloc = None
            if len(F) >= sum(wants.values()):
                alloc = _allocate(sorted(F - vx), wants, idx.bd, B)
            if alloc is None:
                surplus.setdefault(B, set()).update(v for j in js for v in bm[(B, j)] & F)
                continue
            for j in js:
                bm[(B, j)] = (bm[(B, j)] - F) | alloc[j]
            for key in bm:
                if key[0] == B and key[1] not in js:
                    bm[key] -= F - set().union(*alloc.values())
            rebalanced.append((B, Bi))
    bm = {key: frozenset(v) for key, v in bm.items()}

    per_occ = {}
    for i, p in idx.paths.items():
        ms = set()
        for x, y in zip(p, p[1:]):
            ms |= bm[(x, y)] | bm[(y, x)]
        per_occ[i] = frozenset(ms)
    return WpcMarking(idx, bm, per_occ, per_heavy, rebalanced,
                      {b: frozenset(v) for b, v in surplus.items()})


def mark_wpc(inst: Instance, pt: PartitionTree) -> WpcMarking:
    return _mark(_State(inst, pt))


# --------------------------------------------------------------------- rules

def stranded(st: _State, s, t) -> list:
    """Ex-terminals of a dropped pair that no longer occur anywhere."""
    left = st.terminals()
    return [x for x in (s, t) if x not in left]


def _rr4(st: _State) -> bool:
    mult = st.mult()
    for i, (s, t) in enumerate(st.pairs):
        if st.wg.has_edge(s, t) and mult[norm_edge(s, t)] == 1:
            n0, k0 = len(st.wg), st.k
            del st.pairs[i]
            gone = stranded(st, s, t)
            st.delete(gone)
            st.trace.add("RR4", gone, [(s, t)], n=(n0, len(st.wg)), k=(k0, st.k))
            return True
    return False


def _bypass_candidate(st: _State, mk: WpcMarking):
    forest = mk.forest(st.bags, st.tadj)
    vx = st.terminals()
    m2 = mk.m2
    for B in sorted(forest):
        if len(forest[B]) != 2 or st.bags[B] & vx or st.bags[B] & m2:
            continue
        A, C = sorted(forest[B])
        # every valid path through B must enter and leave via A and C
        if set(mk.index.active_at(B)) - {A, C}:
            continue
        # joining the boundaries must not turn a repeated pair into a heavy one
        left, right = st.bd(A, B), st.bd(C, B)
        mult = st.mult()
        if any(c >= 2 and ((s in left and t in right) or (t in left and s in right))
               for (s, t), c in mult.items()):
            continue
        return B, A, C
    return None


def _rr6(st: _State, B, A, C):
    n0 = len(st.wg)
    left, right = st.bd(A, B), st.bd(C, B)
    for u in left:
        for v in right:
            st.wg.add_edge(u, v)
    others = sorted(st.tadj[B] - {A, C})
    st.tadj[A].discard(B)
    st.tadj[C].discard(B)
    for x in others:
        st.tadj[x].discard(B)
        st.tadj[x].add(A)
        st.tadj[A].add(x)
    st.tadj[A].add(C)
    st.tadj[C].add(A)
    del st.tadj[B]
    st.delete(st.bags.pop(B))
    st.trace.add("RR6", [], n=(n0, len(st.wg)), k=(st.k, st.k),
                 note=f"bag {B} bypassed, bags {A} and {C} joined")


def _reduce(st: _State):
    """RR4 to exhaustion, then RR5/RR6 with re-marking. Returns the final
    marking, or 'no' when RR5 fires."""
    while True:
        while _rr4(st):
            pass
        if st.k == 0:
            return None
        mk = _mark(st)
        dead = [key for key in sorted(mk.index.count) if not mk.index.bd[key]]
        if dead:
            B, A = dead[0]
            st.trace.add("empty-boundary", n=(len(st.wg), len(st.wg)), k=(st.k, st.k),
                         note=f"a valid path crosses bags {B},{A} but no edge joins them")
            return "no"
        cand = _bypass_candidate(st, mk)
        if cand is None:
            return mk
        B, A, C = cand
        ka, kc = mk.index.count[(B, A)], mk.index.count[(B, C)]
        ba, bc = mk.index.bd[(B, A)], mk.index.bd[(B, C)]
        if len(ba) < ka or len(bc) < kc:
            st.trace.add("RR5", sorted(st.bags[B]), n=(len(st.wg), len(st.wg)), k=(st.k, st.k),
                         note=f"bag {B}: |bd|={len(ba)},{len(bc)} demand {ka},{kc}")
            return "no"
        _rr6(st, B, A, C)


def wpc_ledger(st: _State, mk: WpcMarking) -> dict:
    k = st.k
    forest = mk.forest(st.bags, st.tadj)
    deg = Counter(len(nb) for nb in forest.values())
    leaves = deg[1]
    deg2 = deg[2]
    deg3 = sum(c for d, c in deg.items() if d >= 3)
    m1 = mk.m1
    per_bag = {}
    bag_ok = True
    for b, vs in st.bags.items():
        marked = len(vs & m1)
        quota = sum(2 * mk.index.count[(b, y)] for y in mk.index.active_at(b))
        extra = len(mk.surplus.get(b, ()))
        per_bag[b] = marked
        bag_ok &= marked <= quota + extra
    sizes = {
        "V": (len(st.wg), None),
        "forest_leaves": (leaves, 2 * k),
        "forest_degree2": (deg2, 2 * k + k // 2),
        "forest_degree3": (deg3, 2 * k),
        "max_marks_per_bag": (max(per_bag.values(), default=0), None),
    }
    checks = {name: val <= b for name, (val, b) in sizes.items() if b is not None}
    checks["bag_marks_within_quota"] = bag_ok
    checks["load_per_bag"] = all(mk.index.load(b) <= 2 * k for b in st.bags)
    checks["heavy_marks"] = all(len(s) <= 2 * k for s in mk.per_heavy.values())
    return {"sizes": sizes, "checks": checks}


def kernelize_wpc_vdp(inst: Instance, pt: PartitionTree | None = None) -> KernelOutcome:
    if inst.problem != "vdp":
        raise PreconditionError("pipeline is for VDP")
    pt = pt or inst.tree
    if pt is None:
        raise PreconditionError("a partition tree is required")
    v = validate_partition_tree(inst.graph, pt)
    if not isinstance(v, Ok):
        raise PreconditionError(f"invalid partition tree: condition {v.condition} {v.witness}")
    trace = RuleTrace()
    if inst.k == 0:
        return KernelOutcome("yes", trace=trace, witness=Solution((), "vdp"), reason="no pairs")
    tv = validate_instance(inst)
    if isinstance(tv, TriviallyNo):
        trace.add("degree-check", n=(inst.n, inst.n), k=(inst.k, inst.k), note=tv.reason)
        return KernelOutcome("no", trace=trace, reason=tv.reason)
    st = _State(inst, pt)
    mk = _reduce(st)
    if mk is None:
        return KernelOutcome("yes", trace=st.trace, reason="every pair was light")
    if mk == "no":
        last = st.trace.steps[-1].rule
        why = "boundary smaller than its crossing demand" if last == "RR5" else "a valid path crosses an empty boundary"
        return KernelOutcome("no", trace=st.trace, reason=f"{last}: {why}")
    info = wpc_ledger(st, mk)
    keep = mk.m1 | mk.m2 | st.terminals()
    gone = sorted(set(st.wg.adj) - keep)
    if gone:
        n0 = len(st.wg)
        st.delete(gone)
        st.trace.add("unmarked-deletion", gone, n=(n0, len(st.wg)), k=(st.k, st.k),
                     note="non-terminal vertices outside every marked set")
    for b in sorted(st.bags):
        if not st.bags[b] and len(st.bags) > 1:
            st.drop_bag(b)
    order = sorted(st.bags)
    rename = {b: i for i, b in enumerate(order, 1)}
    bags = {rename[b]: st.bags[b] for b in order}
    tedges = [(rename[a], rename[b]) for a in st.tadj for b in st.tadj[a] if a < b]
    red, mp = emit(st.wg, st.pairs, "vdp", tree=(bags, tedges))
    st.trace.mapping = mp
    info["checks"]["partition_tree"] = isinstance(validate_partition_tree(red.graph, red.tree), Ok)
    info["sizes"]["V"] = (red.n, None)
    return KernelOutcome("reduced", red, st.trace, info=info)
