"""Exhaustive reference solver, independent of the package's search code."""
from __future__ import annotations

import networkx as nx


def _edges(p):
    return {frozenset(e) for e in zip(p, p[1:])}


def _conflict(p, q, problem: str) -> bool:
    if problem == "edp":
        return bool(_edges(p) & _edges(q))
    if p == q or p == q[::-1]:
        return True
    return bool(set(p[1:-1]) & set(q)) or bool(set(q[1:-1]) & set(p))


def candidate_paths(inst):
    g = nx.Graph()
    g.add_nodes_from(inst.graph.vertices())
    g.add_edges_from(inst.graph.edges)
    return [[tuple(p) for p in nx.all_simple_paths(g, s, t)] for s, t in inst.pairs]


def brute_min_total(inst):
    """Minimum total edge count over all valid path tuples, or None."""
    cands = candidate_paths(inst)
    best = [None]

    def go(i, chosen, total):
        if best[0] is not None and total >= best[0]:
            return
        if i == len(cands):
            best[0] = total
            return
        for p in sorted(cands[i], key=len):
            if all(not _conflict(p, q, inst.problem) for q in chosen):
                chosen.append(p)
                go(i + 1, chosen, total + len(p) - 1)
                chosen.pop()

    go(0, [], 0)
    return best[0]


def brute_yes(inst) -> bool:
    return brute_min_total(inst) is not None
