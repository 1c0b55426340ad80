"""Exhaustive reference solver for VDP and EDP on small instances.

Occurrences of the same unordered pair are grouped; the search repeatedly
picks the group with the fewest candidate paths in the residual graph and
branches over them. Paths within a group are generated in strictly
increasing tuple order, which removes the permutation symmetry between
identical occurrences without losing solutions.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Instance, Solution, norm_edge

DEFAULT_BUDGET = 10**7
CANDIDATE_CAP = 48
INF = 1 << 30


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Infeasible:
    reason: str
    exhausted: bool = True


def check_solution(inst: Instance, sol: Solution) -> list[str]:
    """Independent verifier; returns a list of violations (empty when valid)."""
    errs = []
    g = inst.graph
    if sol.mode != inst.problem:
        errs.append(f"mode {sol.mode} != problem {inst.problem}")
    if len(sol.paths) != inst.k:
        return errs + [f"{len(sol.paths)} paths for {inst.k} pairs"]
    for i, (p, (s, t)) in enumerate(zip(sol.paths, inst.pairs)):
        if len(p) < 2 or p[0] != s or p[-1] != t:
            errs.append(f"path {i} does not join {s} and {t}")
        if len(set(p)) != len(p):
            errs.append(f"path {i} repeats a vertex")
        for a, b in zip(p, p[1:]):
            if not (1 <= a <= g.n and 1 <= b <= g.n) or not g.has_edge(a, b):
                errs.append(f"path {i} uses non-edge {a}-{b}")
    if errs:
        return errs
    if inst.problem == "edp":
        owner = {}
        for i, p in enumerate(sol.paths):
            for a, b in zip(p, p[1:]):
                e = norm_edge(a, b)
                if e in owner:
                    errs.append(f"edge {e} used by paths {owner[e]} and {i}")
                owner[e] = i
    else:
        for i, p in enumerate(sol.paths):
            inner = set(p[1:-1])
            for j, q in enumerate(sol.paths):
                if i != j and inner & set(q):
                    errs.append(f"internal vertex of path {i} lies on path {j}")
        seen = {}
        for i, p in enumerate(sol.paths):
            key = min(tuple(p), tuple(reversed(p)))
            if key in seen:
                errs.append(f"paths {seen[key]} and {i} coincide")
            seen[key] = i
    return errs


class _Search:
    def __init__(self, inst: Instance, budget: int, internal_allowed=None):
        self.inst = inst
        self.mode = inst.problem
        self.budget = budget
        self.nodes = 0
        g = inst.graph
        self.nbr = [0] * (g.n + 1)
        for u, v in g.edges:
            self.nbr[u] |= 1 << v
            self.nbr[v] |= 1 << u
        self.rnb = list(self.nbr)
        self.free_edges = g.m
        groups: dict = {}
        for i, (s, t) in enumerate(inst.pairs):
            groups.setdefault(norm_edge(s, t), []).append(i)
        self.groups = [(a, b, occ) for (a, b), occ in sorted(groups.items())]
        self.rem = [len(occ) for _, _, occ in self.groups]
        self.last: list = [None] * len(self.groups)
        self.chosen: list = [[] for _ in self.groups]
        allv = 0
        for v in g.vertices():
            allv |= 1 << v
        if internal_allowed is not None:
            allowed = 0
            for v in internal_allowed:
                allowed |= 1 << v
            allv &= allowed
        term = 0
        for v in inst.terminals:
            term |= 1 << v
        # vertices usable as interior points of a new path
        self.mid = allv & ~term if self.mode == "vdp" else allv
        self.rem_occ = dict(inst.occurrences)
        self.group_of_vertex: dict = {}
        for gi, (a, b, _) in enumerate(self.groups):
            self.group_of_vertex.setdefault(a, []).append(gi)
            self.group_of_vertex.setdefault(b, []).append(gi)

    def tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"search exceeded {self.budget} nodes")

    def dist(self, src: int, dst: int, mid: int) -> int:
        nb = self.rnb
        dbit = 1 << dst
        reached = 1 << src
        frontier = reached
        d = 0
        while frontier:
            if frontier & dbit:
                return d
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= nb[low.bit_length() - 1]
                f ^= low
            nxt &= (mid | dbit) & ~reached
            reached |= nxt
            frontier = nxt
            d += 1
        return INF

    def paths(self, a: int, b: int, maxlen: int, after):
        """Simple a-b paths in the residual graph, each > `after` in tuple order."""
        nb = self.rnb
        mid = self.mid & ~(1 << b)
        bbit = 1 << b
        path = [a]
        alen = len(after) if after is not None else 0

        def rec(cur, visited, length, tight):
            # tight: the current prefix equals after[:len(path)]
            self.tick()
            m = nb[cur]
            pos = len(path)
            if m & bbit and length + 1 <= maxlen:
                if not tight or pos >= alen or b > after[pos]:
                    yield tuple(path) + (b,)
            if length + 2 > maxlen:
                return
            cand = m & mid & ~visited
            if tight and pos < alen:
                cand &= ~((1 << after[pos]) - 1)
            while cand:
                low = cand & -cand
                cand ^= low
                w = low.bit_length() - 1
                vis = visited | low
                d = self.dist(w, b, mid & ~vis)
                if length + 1 + d > maxlen:
                    continue
                path.append(w)
                yield from rec(w, vis, length + 1, tight and pos < alen and w == after[pos])
                path.pop()

        if after is not None and after[0] != a:
            after = None
            alen = 0
        return rec(a, 1 << a, 0, after is not None)

    def place(self, gi, p):
        if self.mode == "edp":
            for x, y in zip(p, p[1:]):
                self.rnb[x] &= ~(1 << y)
                self.rnb[y] &= ~(1 << x)
            self.free_edges -= len(p) - 1
        else:
            for x in p[1:-1]:
                self.mid &= ~(1 << x)
        a, b, _ = self.groups[gi]
        self.rem[gi] -= 1
        self.rem_occ[a] -= 1
        self.rem_occ[b] -= 1
        self.chosen[gi].append(p)
        prev = self.last[gi]
        self.last[gi] = p
        return prev

    def unplace(self, gi, p, prev):
        if self.mode == "edp":
            for x, y in zip(p, p[1:]):
                self.rnb[x] |= 1 << y
                self.rnb[y] |= 1 << x
            self.free_edges += len(p) - 1
        else:
            for x in p[1:-1]:
                self.mid |= 1 << x
        a, b, _ = self.groups[gi]
        self.rem[gi] += 1
        self.rem_occ[a] += 1
        self.rem_occ[b] += 1
        self.chosen[gi].pop()
        self.last[gi] = prev

    def degree_ok(self) -> bool:
        for v, need in self.rem_occ.items():
            if need == 0:
                continue
            if self.mode == "edp":
                have = bin(self.rnb[v]).count("1")
            else:
                have = bin(self.nbr[v] & self.mid).count("1")
                for gi in self.group_of_vertex[v]:
                    a, b, _ = self.groups[gi]
                    if self.rem[gi] and self.nbr[a] >> b & 1:
                        have += 1
            if have < need:
                return False
        return True

    def run(self, budget_left: int) -> bool:
        live = [gi for gi in range(len(self.groups)) if self.rem[gi]]
        if not live:
            return True
        self.tick()
        if not self.degree_ok():
            return False
        lbs = {}
        for gi in live:
            a, b, _ = self.groups[gi]
            d = self.dist(a, b, self.mid & ~(1 << b))
            if d >= INF:
                return False
            lbs[gi] = d
        total_lb = sum(lbs[gi] * self.rem[gi] for gi in live)
        # every path needs its edges (EDP) or its interior vertices (VDP)
        # from the residual supply
        if self.mode == "edp":
            budget_left = min(budget_left, self.free_edges)
        else:
            copies = sum(self.rem[gi] for gi in live)
            budget_left = min(budget_left, bin(self.mid).count("1") + copies)
        if total_lb > budget_left:
            return False
        best = None
        for gi in live:
            a, b, _ = self.groups[gi]
            maxlen = budget_left - (total_lb - lbs[gi])
            gen = self.paths(a, b, maxlen, self.last[gi])
            head = []
            for p in gen:
                head.append(p)
                if len(head) >= CANDIDATE_CAP:
                    break
            if not head:
                return False
            if best is None or len(head) < len(best[1]):
                best = (gi, head, gen, len(head) >= CANDIDATE_CAP)
                if len(head) == 1:
                    break
        gi, head, gen, more = best

        def candidates():
            yield from head
            if more:
                yield from gen

        for p in candidates():
            prev = self.place(gi, p)
            ok = self.run(budget_left - (len(p) - 1))
            if ok:
                return True
            self.unplace(gi, p, prev)
        return False

    def solution(self) -> Solution:
        paths = [None] * self.inst.k
        for gi, (a, b, occ) in enumerate(self.groups):
            for i, p in zip(occ, self.chosen[gi]):
                s, _ = self.inst.pairs[i]
                paths[i] = p if s == a else tuple(reversed(p))
        return Solution(tuple(paths), self.mode)


def _solve(inst, budget, internal_allowed, cap):
    s = _Search(inst, budget, internal_allowed)
    if s.run(cap):
        return s.solution(), s.nodes
    return Infeasible("search space exhausted"), s.nodes


def solve_exact(inst: Instance, budget: int = DEFAULT_BUDGET, internal_allowed=None):
    """A Solution, or Infeasible once the whole search space is exhausted.

    `internal_allowed` optionally restricts which vertices may appear as
    interior points of paths. Raises BudgetExceeded when the node cap is hit.
    """
    if inst.k == 0:
        return Solution((), inst.problem)
    sol, _ = _solve(inst, budget, internal_allowed, INF)
    return sol


def minimum_solution(inst: Instance, budget: int = DEFAULT_BUDGET, internal_allowed=None):
    """A solution of least total edge count (iterative deepening on that total)."""
    if inst.k == 0:
        return Solution((), inst.problem)
    first, used = _solve(inst, budget, internal_allowed, INF)
    if isinstance(first, Infeasible):
        return first
    probe = _Search(inst, budget, internal_allowed)
    lb = 0
    for gi, (a, b, occ) in enumerate(probe.groups):
        lb += probe.dist(a, b, probe.mid & ~(1 << b)) * len(occ)
    for limit in range(lb, first.total_edges):
        s = _Search(inst, budget - used, internal_allowed)
        if s.run(limit):
            return s.solution()
        used += s.nodes
    return first


def is_yes(inst: Instance, budget: int = DEFAULT_BUDGET) -> bool:
    return not isinstance(solve_exact(inst, budget), Infeasible)
