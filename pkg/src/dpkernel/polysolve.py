"""Polynomial-time VDP solvers for threshold graphs (greedy on the weakest
independent vertex) and block graphs (forced routes plus a matching)."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .classes import NotBlockGraph, NotSplit, NotThreshold, block_decomposition, partition_for, threshold_order
from .core import Instance, Solution, norm_edge
from .edp_split import PreconditionError
from .oracle import Infeasible, check_solution
from .vdp_split import _construction


@dataclass(frozen=True)
class GreedyState:
    """One greedy iteration: v is the weakest independent terminal."""

    v: int
    x_v: tuple  # occurrence indices containing v
    Y: frozenset
    T: frozenset
    direct: tuple  # occurrence indices served by the edge (v, y)
    ell: int
    tau: tuple  # middle vertex per remaining occurrence, in x_v order


def _orient(path, s):
    return tuple(path) if path[0] == s else tuple(reversed(path))


def _clique_endgame(adj, occ: dict, paths: dict):
    """occ: index -> (s, t) inside a clique. Fills paths or returns a reason."""
    terms = {v for p in occ.values() for v in p}
    spare = sorted(v for v in adj if v not in terms)
    seen: set = set()
    extra = []
    for i in sorted(occ):
        s, t = occ[i]
        e = norm_edge(s, t)
        if e in seen:
            extra.append(i)
        else:
            seen.add(e)
            paths[i] = (s, t)
    if len(extra) > len(spare):
        return f"clique part needs {len(extra)} middle vertices, has {len(spare)}"
    for i, u in zip(extra, spare):
        s, t = occ[i]
        paths[i] = (s, u, t)
    return None


def solve_threshold_vdp(inst: Instance, log: list | None = None) -> Solution | Infeasible:
    """Exact VDP on a threshold graph. `log` receives one GreedyState per
    iteration."""
    if inst.problem != "vdp":
        raise PreconditionError("solver is for VDP")
    sp = partition_for(inst)
    if isinstance(sp, NotSplit) or isinstance(threshold_order(inst.graph, sp), NotThreshold):
        raise PreconditionError("not a threshold graph")
    adj = {v: set(inst.graph.adj[v]) for v in inst.graph.vertices()}
    C = set(sp.C)
    occ = dict(enumerate(inst.pairs))
    paths: dict = {}

    # clean-up: matched free independent vertices serve surplus heavy occurrences
    free = set(adj) - C - inst.terminals
    aux = _construction(adj, inst.pairs, C, free)
    used = Counter()
    for ci, x in sorted(aux.matching.items()):
        e = aux.copies[ci][0]
        skip = used[e]
        for i in sorted(occ):
            if norm_edge(*occ[i]) == e:
                if skip:
                    skip -= 1
                    continue
                s, t = occ.pop(i)
                paths[i] = (s, x, t)
                used[e] += 1
                break
    for x in free:
        for y in adj.pop(x):
            adj[y].discard(x)

    while True:
        I = [v for v in adj if v not in C]
        if not I:
            break
        v = min(I, key=lambda w: (len(adj[w]), w))
        xv = tuple(i for i in sorted(occ) if v in occ[i])
        assert xv, "after clean-up every independent vertex is a terminal"
        Y = frozenset(w for i in xv for w in occ[i] if w != v)
        T = frozenset(w for i in occ if i not in xv for w in occ[i])
        direct, rest, served = [], [], set()
        for i in xv:
            y = occ[i][0] if occ[i][1] == v else occ[i][1]
            if y in adj[v] and y not in served:
                served.add(y)
                direct.append(i)
            else:
                rest.append(i)
        pool = sorted(adj[v] - Y - T)
        state = GreedyState(v, xv, Y, T, tuple(direct), len(rest), tuple(pool[: len(rest)]))
        if log is not None:
            log.append(state)
        if len(pool) < len(rest):
            return Infeasible(f"independent terminal {v} needs {len(rest)} middle vertices, has {len(pool)}")
        touched = {v}
        for i in direct:
            s, t = occ[i]
            paths[i] = (s, t)
            touched.update((s, t))
        for i, u in zip(rest, pool):
            s, t = occ[i]
            paths[i] = _orient((v, u, t if s == v else s), s)
            touched.update((s, t, u))
        for i in xv:
            del occ[i]
        gone = touched - T
        for x in gone:
            for y in adj.pop(x):
                if y in adj:
                    adj[y].discard(x)
        C -= gone

    why = _clique_endgame(adj, occ, paths)
    if why:
        return Infeasible(why)
    sol = Solution(tuple(paths[i] for i in range(inst.k)), "vdp")
    assert not check_solution(inst, sol), check_solution(inst, sol)
    return sol


def _shortest(adj, s, t):
    parent = {s: None}
    frontier = [s]
    while frontier and t not in parent:
        nxt = []
        for x in frontier:
            for y in sorted(adj[x]):
                if y not in parent:
                    parent[y] = x
                    nxt.append(y)
        frontier = nxt
    path = [t]
    while path[-1] != s:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def solve_block_vdp(inst: Instance) -> Solution | Infeasible:
    """Exact VDP on a connected block graph."""
    if inst.problem != "vdp":
        raise PreconditionError("solver is for VDP")
    if not inst.graph.is_connected():
        raise PreconditionError("block solver needs a connected graph")
    d = block_decomposition(inst.graph)
    if isinstance(d, NotBlockGraph):
        raise PreconditionError("not a block graph: " + d.reason)
    adj = inst.graph.adj
    terms = inst.terminals
    member = d.blocks_of
    paths: dict = {}
    inner_used: dict = {}
    in_block: dict = {}  # occurrence -> block index
    for i, (s, t) in enumerate(inst.pairs):
        common = set(member[s]) & set(member[t])
        if common:
            in_block[i] = min(common)
            continue
        p = _shortest(adj, s, t)
        for u in p[1:-1]:
            if u in terms:
                return Infeasible(f"route of pair {i} passes terminal {u}")
            if u in inner_used:
                return Infeasible(f"routes of pairs {inner_used[u]} and {i} share cut vertex {u}")
            inner_used[u] = i
        paths[i] = p

    free = {b: sorted(v for v in blk if v not in terms and v not in inner_used) for b, blk in enumerate(d.blocks)}
    seen: set = set()
    extras = []
    for i in sorted(in_block):
        s, t = inst.pairs[i]
        e = norm_edge(s, t)
        if e in seen:
            extras.append(i)
        else:
            seen.add(e)
            paths[i] = (s, t)

    owner: dict = {}

    def augment(i, visited):
        for u in free[in_block[i]]:
            if u in visited:
                continue
            visited.add(u)
            if u not in owner or augment(owner[u], visited):
                owner[u] = i
                return True
        return False

    for i in extras:
        if not augment(i, set()):
            return Infeasible(f"no free middle vertex left for repeated pair {inst.pairs[i]}")
    for u, i in owner.items():
        s, t = inst.pairs[i]
        paths[i] = (s, u, t)
    sol = Solution(tuple(paths[i] for i in range(inst.k)), "vdp")
    assert not check_solution(inst, sol), check_solution(inst, sol)
    return sol
