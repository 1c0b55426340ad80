"""EDP on clique paths: pair-type counting per block and the three counting
rules on top of the block rules, giving at most 2k+1 vertices."""
from __future__ import annotations

from dataclasses import dataclass

from .classes import block_decomposition, is_clique_path
from .core import Instance, KernelOutcome
from .edp_block import BlockState, PreconditionError, _start, block_rules_step
from .edp_split import clique_edp_construct


@dataclass(frozen=True)
class PairTypeCounts:
    """Crossing-pair counts of a block. For a two-cut block with cut vertices
    u, w: a (both ends cut vertices), b (u and interior), c (w and interior),
    d (both interior). For an end block only b and d are used."""

    cuts: tuple
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


def _orient(st: BlockState, B, cuts, blocks) -> tuple:
    """(u, w) for a two-cut block: u is nearer the first end block."""
    bc = sorted(B & cuts)
    if len(bc) < 2:
        return tuple(bc)
    ends = [b for b in blocks if len(b & cuts) == 1]
    root = min(ends, key=min) if ends else blocks[0]
    # BFS over vertices, starting from the root block's interior
    dist = {v: 0 for v in root}
    frontier = list(root)
    while frontier:
        nxt = []
        for x in frontier:
            for y in st.wg.adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    u, w = sorted(bc, key=lambda v: (dist[v], v))
    return (u, w)


def _counts(st: BlockState, B, cuts, blocks) -> PairTypeCounts:
    xb = st.restricted_pairs(B)
    bc = B & cuts
    if len(bc) == 2:
        u, w = _orient(st, B, cuts, blocks)
        a = b = c = d = 0
        for s, t in xb:
            ends = {s, t}
            if ends <= {u, w}:
                a += 1
            elif u in ends:
                b += 1
            elif w in ends:
                c += 1
            else:
                d += 1
        return PairTypeCounts((u, w), a, b, c, d)
    if len(bc) == 1:
        (u,) = bc
        b = sum(1 for s, t in xb if u in (s, t))
        return PairTypeCounts((u,), 0, b, 0, len(xb) - b)
    raise PreconditionError(f"block has {len(bc)} cut vertices")


def classify_pairs(inst: Instance, block_id: int) -> PairTypeCounts:
    d = block_decomposition(inst.graph)
    st = BlockState.of(inst)
    blocks, cuts = st.decompose()
    B = d.blocks[block_id]
    return _counts(st, B, cuts, blocks)


def rrc3_refutes(size: int, t: PairTypeCounts) -> bool:
    return size <= max(t.a + t.b, t.a + t.c)


def rrc1_contracts(size: int, t: PairTypeCounts) -> bool:
    return size > t.d + 2 + max(t.b + t.c - 1, 0)


def rrc2_contracts(size: int, t: PairTypeCounts) -> bool:
    return size > t.b + t.d


def _cliquepath_step(st: BlockState) -> str | None:
    blocks, cuts = st.decompose()
    two = [B for B in blocks if len(B & cuts) == 2]
    for B in two:
        t = _counts(st, B, cuts, blocks)
        if rrc3_refutes(len(B), t):
            st.trace.add("RRC3", sorted(B), n=(len(st.wg), len(st.wg)), k=(st.k, st.k),
                         note=f"a={t.a} b={t.b} c={t.c}")
            return "no"
    for B in two:
        t = _counts(st, B, cuts, blocks)
        if rrc1_contracts(len(B), t):
            st.contract(B, "RRC1")
            return "RRC1"
    for B in blocks:
        if len(B & cuts) == 1:
            t = _counts(st, B, cuts, blocks)
            if rrc2_contracts(len(B), t):
                st.contract(B, "RRC2")
                return "RRC2"
    return None


def cliquepath_ledger(inst: Instance) -> dict:
    k = inst.k
    st = BlockState.of(inst)
    blocks, cuts = st.decompose()
    loose = []
    for B in blocks:
        nc = len(B & cuts)
        if nc == 2:
            t = _counts(st, B, cuts, blocks)
            if len(B) > t.d + 2 + max(t.b + t.c - 1, 0):
                loose.append(sorted(B))
        elif nc == 1:
            t = _counts(st, B, cuts, blocks)
            if len(B) > t.b + t.d:
                loose.append(sorted(B))
    sizes = {"V": (inst.n, 2 * k + 1)}
    checks = {"V": inst.n <= 2 * k + 1, "block_accounting": not loose}
    return {"sizes": sizes, "checks": checks}


def kernelize_cliquepath_edp(inst: Instance) -> KernelOutcome:
    out, d = _start(inst)
    if not is_clique_path(d):
        raise PreconditionError("a block has more than two cut vertices")
    if out is not None:
        return out
    if len(d.blocks) == 1:
        if inst.n > inst.k:
            return KernelOutcome("yes", witness=clique_edp_construct(inst), reason="single clique larger than k")
        st = BlockState.of(inst)
        red = st.emit()
        return KernelOutcome("reduced", red, st.trace, info=cliquepath_ledger(red))
    st = BlockState.of(inst)
    while True:
        if st.k == 0:
            return KernelOutcome("yes", trace=st.trace, reason="every pair absorbed by contractions")
        step = block_rules_step(st)
        if step is None:
            step = _cliquepath_step(st)
        if step == "no":
            return KernelOutcome("no", trace=st.trace, reason=f"{st.trace.steps[-1].rule}: block cannot carry its pairs")
        if step is None:
            break
    red = st.emit()
    return KernelOutcome("reduced", red, st.trace, info=cliquepath_ledger(red))
