"""EDP on block graphs: block contraction, restriction to a block, and the
three block rules giving at most 4k-2 blocks of at most k vertices each."""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .classes import BlockDecomposition, NotBlockGraph, block_decomposition
from .core import (
    Graph,
    Instance,
    KernelOutcome,
    RuleTrace,
    Solution,
    TriviallyNo,
    WorkGraph,
    emit,
    validate_instance,
)
from .edp_split import PreconditionError


def rrb3_contracts(size: int, demand: int) -> bool:
    """A two-cut block without interior terminals carries `demand` pairs
    across it; it can be contracted exactly when size > demand."""
    return size > demand


@dataclass
class BlockState:
    """Working block graph plus pairs under working labels."""

    wg: WorkGraph
    pairs: list
    trace: RuleTrace

    @classmethod
    def of(cls, inst: Instance) -> "BlockState":
        return cls(WorkGraph(inst.graph), list(inst.pairs), RuleTrace())

    @property
    def k(self) -> int:
        return len(self.pairs)

    def terminals(self) -> set:
        return {v for p in self.pairs for v in p}

    def decompose(self) -> tuple[list, set]:
        adj = self.wg.adj
        if len(adj) == 1:
            return [frozenset(adj)], set()
        h = nx.Graph()
        h.add_nodes_from(adj)
        h.add_edges_from((u, v) for u in adj for v in adj[u] if u < v)
        blocks = sorted((frozenset(b) for b in nx.biconnected_components(h)), key=lambda b: min(b))
        return blocks, set(nx.articulation_points(h))

    def hang_map(self, B: frozenset) -> dict:
        """h: identity on B, and every other vertex goes to the cut vertex of
        B through which its component of G - B attaches."""
        adj = self.wg.adj
        h = {x: x for x in B}
        for x in sorted(adj):
            if x in h:
                continue
            comp = [x]
            h[x] = None
            i = 0
            while i < len(comp):
                for y in adj[comp[i]]:
                    if y not in h:
                        h[y] = None
                        comp.append(y)
                i += 1
            att = {y for c in comp for y in adj[c] if y in B}
            if len(att) != 1:
                raise PreconditionError("component attaches to a block through several vertices")
            (a,) = att
            for c in comp:
                h[c] = a
        return h

    def restricted_pairs(self, B: frozenset) -> list:
        h = self.hang_map(B)
        return [(h[s], h[t]) for s, t in self.pairs if h[s] != h[t]]

    def contract(self, B: frozenset, rule: str):
        n0, k0 = len(self.wg), self.k
        v = self.wg.fresh()
        for u in B:
            for w in self.wg.adj[u]:
                if w not in B:
                    self.wg.add_edge(v, w)
        self.wg.remove(B)
        kept, dropped = [], []
        for s, t in self.pairs:
            fs = v if s in B else s
            ft = v if t in B else t
            if fs == ft:
                dropped.append((s, t))
            else:
                kept.append((fs, ft))
        self.pairs = kept
        self.trace.add(rule, sorted(B), dropped, n=(n0, len(self.wg)), k=(k0, self.k), note=f"contracted to {v}")

    def delete(self, vs, rule: str):
        n0 = len(self.wg)
        self.wg.remove(vs)
        self.trace.add(rule, sorted(vs), n=(n0, len(self.wg)), k=(self.k, self.k))

    def emit(self, problem="edp") -> Instance:
        inst, mp = emit(self.wg, self.pairs, problem)
        self.trace.mapping = mp
        return inst


def _index_block(inst: Instance, block_id: int) -> tuple[BlockState, frozenset, BlockDecomposition]:
    d = block_decomposition(inst.graph)
    if isinstance(d, NotBlockGraph):
        raise PreconditionError("not a block graph: " + d.reason)
    if not 0 <= block_id < len(d.blocks):
        raise PreconditionError(f"no block with index {block_id}")
    return BlockState.of(inst), d.blocks[block_id], d


def contract_block(inst: Instance, block_id: int) -> Instance:
    st, B, _ = _index_block(inst, block_id)
    st.contract(B, "contract")
    return st.emit(inst.problem)


def restrict_to_block(inst: Instance, block_id: int) -> Instance:
    """(B, X_B) as a clique instance; vertices of B are renumbered ascending."""
    st, B, _ = _index_block(inst, block_id)
    xb = st.restricted_pairs(B)
    order = sorted(B)
    mp = {v: i for i, v in enumerate(order, 1)}
    edges = [(mp[a], mp[b]) for a in order for b in order if a < b]
    return Instance(Graph.from_edges(len(order), edges), tuple((mp[s], mp[t]) for s, t in xb), inst.problem)


def _start(inst: Instance):
    """Shared entry checks; returns (outcome or None, decomposition)."""
    if not inst.graph.is_connected():
        raise PreconditionError("block pipelines need a connected graph")
    d = block_decomposition(inst.graph)
    if isinstance(d, NotBlockGraph):
        raise PreconditionError("not a block graph: " + d.reason)
    trace = RuleTrace()
    if inst.k == 0:
        return KernelOutcome("yes", trace=trace, witness=Solution((), "edp"), reason="no pairs"), d
    v = validate_instance(inst)
    if isinstance(v, TriviallyNo):
        trace.add("degree-check", n=(inst.n, inst.n), k=(inst.k, inst.k), note=v.reason)
        return KernelOutcome("no", trace=trace, reason=v.reason), d
    return None, d


def block_rules_step(st: BlockState) -> str | None:
    """Apply the first applicable block rule once. Returns the rule name,
    'no' for a negative answer, or None when no rule applies."""
    blocks, cuts = st.decompose()
    terms = st.terminals()
    for B in blocks:
        bc = B & cuts
        if len(bc) == 1 and not ((B - bc) & terms):
            st.delete(B - bc, "RRB1")
            return "RRB1"
    for B in blocks:
        if len(B) > st.k:
            st.contract(B, "RRB2")
            return "RRB2"
    for B in blocks:
        bc = B & cuts
        if len(bc) == 2 and not ((B - bc) & terms):
            demand = len(st.restricted_pairs(B))
            if rrb3_contracts(len(B), demand):
                st.contract(B, "RRB3")
                return "RRB3"
            st.trace.add("RRB3", sorted(B), n=(len(st.wg), len(st.wg)), k=(st.k, st.k),
                         note=f"{len(B)} vertices cannot carry {demand} crossing pairs")
            return "no"
    return None


def block_ledger(inst: Instance) -> dict:
    k = inst.k
    d = block_decomposition(inst.graph)
    nb = len(d.blocks)
    biggest = max(len(b) for b in d.blocks)
    low_cut_without_terminal = [
        sorted(b) for i, b in enumerate(d.blocks)
        if len(d.cuts_of(i)) <= 2 and not ((b - d.cut_vertices) & inst.terminals)
    ]
    sizes = {
        "blocks": (nb, 4 * k - 2),
        "block_size": (biggest, k),
        "V": (inst.n, 4 * k * k - 2 * k),
    }
    checks = {name: val <= bound for name, (val, bound) in sizes.items()}
    checks["low_cut_blocks_hold_terminals"] = not low_cut_without_terminal
    return {"sizes": sizes, "checks": checks}


def kernelize_block_edp(inst: Instance) -> KernelOutcome:
    out, _ = _start(inst)
    if out is not None:
        return out
    st = BlockState.of(inst)
    while True:
        if st.k == 0:
            return KernelOutcome("yes", trace=st.trace, reason="every pair absorbed by contractions")
        step = block_rules_step(st)
        if step == "no":
            return KernelOutcome("no", trace=st.trace, reason="RRB3: block too small for its crossing pairs")
        if step is None:
            break
    red = st.emit()
    return KernelOutcome("reduced", red, st.trace, info=block_ledger(red))
