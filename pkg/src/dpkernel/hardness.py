"""Completion of an EDP instance to a complete graph: every missing edge is
added together with a pair on its endpoints."""
from __future__ import annotations

from itertools import combinations

from .core import Graph, Instance
from .edp_split import PreconditionError


def completeify_edp(inst: Instance) -> Instance:
    if inst.problem != "edp":
        raise PreconditionError("completion is defined for EDP")
    if inst.n < 2:
        raise PreconditionError("need at least two vertices")
    missing = [(u, v) for u, v in combinations(inst.graph.vertices(), 2) if not inst.graph.has_edge(u, v)]
    g = Graph.from_edges(inst.n, list(inst.graph.edges) + missing)
    return Instance(g, inst.pairs + tuple(missing), "edp")
