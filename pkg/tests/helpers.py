from itertools import combinations

from dpkernel.core import Graph, Instance
from dpkernel.oracle import Infeasible, solve_exact


def make(n, edges, pairs, problem="edp", clique=None, tree=None):
    c = frozenset(clique) if clique is not None else None
    return Instance(Graph.from_edges(n, edges), tuple(pairs), problem, c, tree)


def complete_edges(vs):
    return list(combinations(vs, 2))


def answer(inst) -> str:
    return "no" if isinstance(solve_exact(inst), Infeasible) else "yes"


def implied(out) -> str:
    """The answer an outcome stands for, resolving reduced ones exactly."""
    return answer(out.instance) if out.status == "reduced" else out.status
