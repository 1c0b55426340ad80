"""Recognition and decomposition for split, threshold, block, clique-path and
well-partitioned chordal graphs."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import networkx as nx

from .core import Graph, Instance, Ok, PartitionTree


# ------------------------------------------------------------------- split

@dataclass(frozen=True)
class SplitPartition:
    C: frozenset
    I: frozenset

    def terminal_side(self, inst: Instance) -> frozenset:
        return self.I & inst.terminals

    def free_side(self, inst: Instance) -> frozenset:
        return self.I - inst.terminals


@dataclass(frozen=True)
class NotSplit:
    reason: str
    obstruction: tuple | None = None


def is_split_partition(g: Graph, clique) -> bool:
    clique = set(clique)
    if not clique <= set(g.vertices()):
        return False
    for u, v in combinations(sorted(clique), 2):
        if not g.has_edge(u, v):
            return False
    return all(u in clique or v in clique for u, v in g.edges)


def _obstruction(g: Graph):
    """An induced 2K2, C4 or C5, searched by brute force on small graphs."""
    vs = list(g.vertices())
    if g.n <= 40:
        for quad in combinations(vs, 4):
            es = [(a, b) for a, b in combinations(quad, 2) if g.has_edge(a, b)]
            degs = sorted(sum(v in e for e in es) for v in quad)
            if len(es) == 2 and degs == [1, 1, 1, 1]:
                return ("2K2", quad)
            if len(es) == 4 and degs == [2, 2, 2, 2]:
                return ("C4", quad)
    if g.n <= 25:
        for five in combinations(vs, 5):
            es = [(a, b) for a, b in combinations(five, 2) if g.has_edge(a, b)]
            if len(es) == 5 and all(sum(v in e for e in es) == 2 for v in five):
                return ("C5", five)
    return None


def split_partition(g: Graph) -> SplitPartition | NotSplit:
    """Degree-sequence recognition, then an explicit verification pass.

    Among partitions with a maximum clique side, the lexicographically
    smallest clique side is returned.
    """
    order = sorted(g.vertices(), key=lambda v: (-g.degree(v), v))
    degs = [g.degree(v) for v in order]
    m = 0
    for i, d in enumerate(degs, 1):
        if d >= i - 1:
            m = i
    lhs = sum(degs[:m])
    rhs = m * (m - 1) + sum(degs[m:])
    if lhs != rhs:
        return NotSplit(f"degree sum check failed ({lhs} != {rhs})", _obstruction(g))
    base = frozenset(order[:m])
    if not is_split_partition(g, base):
        return NotSplit("greedy partition failed verification", _obstruction(g))
    options = [base]
    rest = set(g.vertices()) - base
    for x in rest:
        missing = base - g.adj[x]
        if len(missing) == 1:
            cand = (base - missing) | {x}
            if is_split_partition(g, cand):
                options.append(frozenset(cand))
    best = min(options, key=lambda c: sorted(c))
    return SplitPartition(best, frozenset(g.vertices()) - best)


def partition_for(inst: Instance) -> SplitPartition | NotSplit:
    """Use the declared clique side when it is a valid split partition."""
    g = inst.graph
    if inst.clique is not None and is_split_partition(g, inst.clique):
        return SplitPartition(frozenset(inst.clique), frozenset(g.vertices()) - inst.clique)
    return split_partition(g)


# --------------------------------------------------------------- threshold

@dataclass(frozen=True)
class ThresholdOrder:
    partition: SplitPartition
    order: tuple  # I sorted so neighbourhoods grow along the tuple


@dataclass(frozen=True)
class NotThreshold:
    reason: str
    witness: tuple | None = None


def threshold_order(g: Graph, sp: SplitPartition | None = None) -> ThresholdOrder | NotThreshold:
    if sp is None:
        sp = split_partition(g)
    if isinstance(sp, NotSplit):
        return NotThreshold("not split: " + sp.reason, sp.obstruction)
    order = tuple(sorted(sp.I, key=lambda v: (g.degree(v), v)))
    for a, b in zip(order, order[1:]):
        if not g.adj[a] <= g.adj[b]:
            return NotThreshold("independent-side neighbourhoods are not nested", (a, b))
    return ThresholdOrder(sp, order)


# ------------------------------------------------------------------- blocks

@dataclass(frozen=True)
class BlockDecomposition:
    blocks: tuple  # frozensets, sorted by smallest member
    cut_vertices: frozenset

    @cached_property
    def blocks_of(self) -> dict[int, list[int]]:
        out: dict = {}
        for i, b in enumerate(self.blocks):
            for v in b:
                out.setdefault(v, []).append(i)
        return out

    def cuts_of(self, i: int) -> frozenset:
        return self.blocks[i] & self.cut_vertices

    @cached_property
    def cut_tree(self) -> dict:
        """Bipartite adjacency over nodes ('B', i) and ('c', v)."""
        adj: dict = {("B", i): set() for i in range(len(self.blocks))}
        for v in self.cut_vertices:
            adj[("c", v)] = set()
            for i in self.blocks_of[v]:
                adj[("c", v)].add(("B", i))
                adj[("B", i)].add(("c", v))
        return adj

    def end_blocks(self) -> list[int]:
        return [i for i in range(len(self.blocks)) if len(self.cuts_of(i)) == 1]


@dataclass(frozen=True)
class NotBlockGraph:
    reason: str
    block: frozenset | None = None


def block_decomposition(g: Graph) -> BlockDecomposition | NotBlockGraph:
    if not g.is_connected():
        raise ValueError("block decomposition needs a connected graph")
    if g.n == 1:
        return BlockDecomposition((frozenset({1}),), frozenset())
    h = nx.Graph()
    h.add_nodes_from(g.vertices())
    h.add_edges_from(g.edges)
    blocks = sorted((frozenset(b) for b in nx.biconnected_components(h)), key=lambda b: min(b))
    for b in blocks:
        for u, v in combinations(sorted(b), 2):
            if not g.has_edge(u, v):
                return NotBlockGraph("block is not a clique", b)
    cuts = frozenset(nx.articulation_points(h))
    return BlockDecomposition(tuple(blocks), cuts)


def is_clique_path(d: BlockDecomposition) -> bool:
    return all(len(d.cuts_of(i)) <= 2 for i in range(len(d.blocks)))


# ---------------------------------------------------------- partition trees

@dataclass(frozen=True)
class Violation:
    condition: str
    witness: tuple = ()


def validate_partition_tree(g: Graph, pt: PartitionTree) -> Ok | Violation:
    seen: dict = {}
    for b, vs in pt.bags:
        for v in vs:
            if v in seen:
                return Violation("partition", (v, seen[v], b))
            seen[v] = b
    missing = set(g.vertices()) - set(seen)
    if missing:
        return Violation("partition", tuple(sorted(missing)))
    ids = [b for b, _ in pt.bags]
    for a, b in pt.tree_edges:
        if a not in pt.bag_map or b not in pt.bag_map or a == b:
            return Violation("tree", (a, b))
    if ids:
        if len(pt.tree_edges) != len(ids) - 1:
            return Violation("tree", ("edge count",))
        reach = {ids[0]}
        stack = [ids[0]]
        while stack:
            x = stack.pop()
            for y in pt.tree_adj[x]:
                if y not in reach:
                    reach.add(y)
                    stack.append(y)
        if len(reach) != len(ids):
            return Violation("tree", ("disconnected",))
    for b, vs in pt.bags:
        for u, v in combinations(sorted(vs), 2):
            if not g.has_edge(u, v):
                return Violation("i", (b, u, v))
    for x, y in sorted(pt.tree_edges):
        bx, by = pt.boundary(g, x, y), pt.boundary(g, y, x)
        for u in bx:
            for v in by:
                if not g.has_edge(u, v):
                    return Violation("ii", (x, y, u, v))
    for u, v in g.edges:
        a, b = pt.bag_of[u], pt.bag_of[v]
        if a != b and b not in pt.tree_adj[a]:
            return Violation("iii", (u, v))
    return Ok()


def recognize(g: Graph) -> list[str]:
    found = []
    if g.n and all(g.degree(v) == g.n - 1 for v in g.vertices()):
        found.append("clique")
    sp = split_partition(g)
    if isinstance(sp, SplitPartition):
        found.append("split")
        if isinstance(threshold_order(g, sp), ThresholdOrder):
            found.append("threshold")
    if g.is_connected() and g.n:
        d = block_decomposition(g)
        if isinstance(d, BlockDecomposition):
            found.append("block")
            if is_clique_path(d):
                found.append("cliquepath")
    return found
