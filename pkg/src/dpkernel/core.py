"""Graphs, instances, the text interchange format and shared result types."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

PROBLEMS = ("vdp", "edp")


class InstanceFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 1..n."""

    n: int
    edges: frozenset

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        es = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u},{v}) out of range 1..{n}")
            es.add(norm_edge(u, v))
        return cls(n, frozenset(es))

    @cached_property
    def adj(self) -> dict[int, frozenset]:
        nb: dict[int, set] = {v: set() for v in range(1, self.n + 1)}
        for u, v in self.edges:
            nb[u].add(v)
            nb[v].add(u)
        return {v: frozenset(s) for v, s in nb.items()}

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> frozenset:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edges

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {1}
        stack = [1]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.n


@dataclass(frozen=True)
class PartitionTree:
    """Bags (id -> vertex set) and undirected tree edges between bag ids."""

    bags: tuple  # sorted tuple of (bag_id, frozenset)
    tree_edges: frozenset  # {(a, b)} with a < b

    @classmethod
    def build(cls, bags: dict, tree_edges: Iterable[tuple[int, int]]) -> "PartitionTree":
        items = tuple(sorted((b, frozenset(vs)) for b, vs in bags.items()))
        return cls(items, frozenset(norm_edge(a, b) for a, b in tree_edges))

    @cached_property
    def bag_map(self) -> dict[int, frozenset]:
        return dict(self.bags)

    @cached_property
    def bag_of(self) -> dict[int, int]:
        return {v: b for b, vs in self.bags for v in vs}

    @cached_property
    def tree_adj(self) -> dict[int, frozenset]:
        nb: dict[int, set] = {b: set() for b, _ in self.bags}
        for a, b in self.tree_edges:
            nb.setdefault(a, set()).add(b)
            nb.setdefault(b, set()).add(a)
        return {b: frozenset(s) for b, s in nb.items()}

    def boundary(self, g: Graph, x: int, y: int) -> frozenset:
        """bd(x, y): vertices of bag x with a neighbour in bag y."""
        ys = self.bag_map[y]
        return frozenset(v for v in self.bag_map[x] if g.adj[v] & ys)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    pairs: tuple  # ordered occurrences (s, t)
    problem: str
    clique: frozenset | None = None
    tree: PartitionTree | None = None

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}")
        for s, t in self.pairs:
            if s == t:
                raise ValueError(f"degenerate pair ({s},{t})")
            if not (1 <= s <= self.graph.n and 1 <= t <= self.graph.n):
                raise ValueError(f"terminal out of range in pair ({s},{t})")

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def n(self) -> int:
        return self.graph.n

    @cached_property
    def terminals(self) -> frozenset:
        return frozenset(v for p in self.pairs for v in p)

    @cached_property
    def occurrences(self) -> Counter:
        """How many pair occurrences each vertex is an endpoint of."""
        c: Counter = Counter()
        for s, t in self.pairs:
            c[s] += 1
            c[t] += 1
        return c

    @cached_property
    def pair_multiplicity(self) -> Counter:
        return Counter(norm_edge(s, t) for s, t in self.pairs)

    def is_heavy(self, s: int, t: int) -> bool:
        return self.graph.has_edge(s, t) and self.pair_multiplicity[norm_edge(s, t)] >= 2

    def is_light(self, s: int, t: int) -> bool:
        return self.graph.has_edge(s, t) and self.pair_multiplicity[norm_edge(s, t)] == 1

    def with_pairs(self, pairs) -> "Instance":
        return Instance(self.graph, tuple(pairs), self.problem, self.clique, self.tree)


@dataclass(frozen=True)
class Solution:
    paths: tuple  # one vertex tuple per occurrence
    mode: str

    @property
    def total_edges(self) -> int:
        return sum(len(p) - 1 for p in self.paths)


@dataclass(frozen=True)
class TriviallyNo:
    reason: str


@dataclass(frozen=True)
class Ok:
    pass


def validate_instance(inst: Instance) -> Ok | TriviallyNo:
    for v in sorted(inst.occurrences):
        need = inst.occurrences[v]
        if inst.graph.degree(v) < need:
            return TriviallyNo(f"terminal {v} has degree {inst.graph.degree(v)} < {need} occurrences")
    return Ok()


# ---------------------------------------------------------------- text format

def parse_instance(text: str) -> Instance:
    header = None
    edges: list = []
    edge_set: set = set()
    pairs: list = []
    clique = None
    bags: dict = {}
    tree_edges: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if header is None:
            if kind != "p" or len(tok) != 6 or tok[1] != "dp":
                raise InstanceFormatError("expected header 'p dp <n> <m> <k> <vdp|edp>'", lineno)
            try:
                n, m, k = int(tok[2]), int(tok[3]), int(tok[4])
            except ValueError:
                raise InstanceFormatError("header counts must be integers", lineno) from None
            if tok[5] not in PROBLEMS:
                raise InstanceFormatError(f"unknown problem {tok[5]!r}", lineno)
            if min(n, m, k) < 0:
                raise InstanceFormatError("negative count in header", lineno)
            header = (n, m, k, tok[5])
            continue
        n = header[0]
        try:
            nums = [int(x) for x in tok[1:]]
        except ValueError:
            raise InstanceFormatError(f"non-integer field in {raw.strip()!r}", lineno) from None

        def check(vs):
            for x in vs:
                if not 1 <= x <= n:
                    raise InstanceFormatError(f"vertex id {x} out of range 1..{n}", lineno)

        if kind == "p":
            raise InstanceFormatError("duplicate header", lineno)
        elif kind == "e":
            if len(nums) != 2:
                raise InstanceFormatError("edge line needs two vertices", lineno)
            check(nums)
            u, v = nums
            if u == v:
                raise InstanceFormatError(f"loop at vertex {u}", lineno)
            e = norm_edge(u, v)
            if e in edge_set:
                raise InstanceFormatError(f"parallel edge {e}", lineno)
            edge_set.add(e)
            edges.append(e)
        elif kind == "t":
            if len(nums) != 2:
                raise InstanceFormatError("pair line needs two vertices", lineno)
            check(nums)
            if nums[0] == nums[1]:
                raise InstanceFormatError("degenerate pair", lineno)
            pairs.append((nums[0], nums[1]))
        elif kind == "c":
            check(nums)
            clique = frozenset(nums)
        elif kind == "b":
            if not nums:
                raise InstanceFormatError("bag line needs an id", lineno)
            check(nums[1:])
            if nums[0] in bags:
                raise InstanceFormatError(f"duplicate bag {nums[0]}", lineno)
            bags[nums[0]] = frozenset(nums[1:])
        elif kind == "bt":
            if len(nums) != 2:
                raise InstanceFormatError("tree edge needs two bag ids", lineno)
            tree_edges.append((nums[0], nums[1]))
        else:
            raise InstanceFormatError(f"unknown line type {kind!r}", lineno)
    if header is None:
        raise InstanceFormatError("missing header")
    n, m, k, problem = header
    if len(edges) != m:
        raise InstanceFormatError(f"header says {m} edges, found {len(edges)}")
    if len(pairs) != k:
        raise InstanceFormatError(f"header says {k} pairs, found {len(pairs)}")
    tree = None
    if bags or tree_edges:
        for a, b in tree_edges:
            if a not in bags or b not in bags:
                raise InstanceFormatError(f"tree edge ({a},{b}) names an unknown bag")
        tree = PartitionTree.build(bags, tree_edges)
    return Instance(Graph(n, frozenset(edges)), tuple(pairs), problem, clique, tree)


def serialize_instance(inst: Instance, comments: Iterable[str] = ()) -> str:
    g = inst.graph
    out = [f"# {c}" for c in comments]
    out.append(f"p dp {g.n} {g.m} {inst.k} {inst.problem}")
    out += [f"e {u} {v}" for u, v in sorted(g.edges)]
    out += [f"t {s} {t}" for s, t in inst.pairs]
    if inst.clique is not None:
        out.append("c " + " ".join(map(str, sorted(inst.clique))) if inst.clique else "c")
    if inst.tree is not None:
        for b, vs in inst.tree.bags:
            out.append(" ".join(["b", str(b)] + [str(v) for v in sorted(vs)]))
        out += [f"bt {a} {b}" for a, b in sorted(inst.tree.tree_edges)]
    return "\n".join(out) + "\n"


# ------------------------------------------------------- traces and outcomes

@dataclass
class TraceStep:
    rule: str
    vertices: tuple = ()
    pairs: tuple = ()
    n_before: int = 0
    n_after: int = 0
    k_before: int = 0
    k_after: int = 0
    note: str = ""

    def line(self) -> str:
        parts = [self.rule, f"n {self.n_before}->{self.n_after}", f"k {self.k_before}->{self.k_after}"]
        if self.vertices:
            parts.append("v " + ",".join(map(str, self.vertices)))
        if self.pairs:
            parts.append("x " + ",".join(f"{a}-{b}" for a, b in self.pairs))
        if self.note:
            parts.append(self.note)
        return " | ".join(parts)


@dataclass
class RuleTrace:
    """Rule applications in order; vertex labels are working labels and
    `mapping` sends the surviving working labels to the emitted ids."""

    steps: list = field(default_factory=list)
    mapping: dict = field(default_factory=dict)

    def add(self, rule, vertices=(), pairs=(), n=(0, 0), k=(0, 0), note=""):
        self.steps.append(TraceStep(rule, tuple(vertices), tuple(pairs), n[0], n[1], k[0], k[1], note))

    def fired(self) -> list[str]:
        return [s.rule for s in self.steps]

    def lines(self) -> list[str]:
        out = [s.line() for s in self.steps]
        if self.mapping:
            out.append("relabel " + " ".join(f"{a}:{b}" for a, b in sorted(self.mapping.items())))
        return out


@dataclass
class KernelOutcome:
    status: str  # "yes" | "no" | "reduced"
    instance: Instance | None = None
    trace: RuleTrace = field(default_factory=RuleTrace)
    witness: Solution | None = None
    reason: str = ""
    info: dict = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.status in ("yes", "no")


def serialize_outcome(out: KernelOutcome, comments: Iterable[str] = ()) -> str:
    lines = [f"RESULT {out.status}"]
    if out.reason:
        lines.append(f"# reason: {out.reason}")
    text = "\n".join(lines) + "\n"
    if out.instance is not None:
        text += serialize_instance(out.instance, comments)
    if out.witness is not None:
        text += "WITNESS\n" + "".join(" ".join(map(str, p)) + "\n" for p in out.witness.paths)
    text += "TRACE\n" + "".join(l + "\n" for l in out.trace.lines())
    return text


# ------------------------------------------------------------ working graphs

class WorkGraph:
    """Mutable graph with arbitrary integer labels, used inside pipelines.

    Fresh vertices get labels above every label seen so far; `freeze`
    renumbers densely (ascending label order) into an immutable Graph.
    """

    def __init__(self, g: Graph | None = None):
        self.adj: dict[int, set] = {}
        self.top = 0
        if g is not None:
            for v in g.vertices():
                self.adj[v] = set(g.adj[v])
            self.top = g.n

    def copy(self) -> "WorkGraph":
        w = WorkGraph()
        w.adj = {v: set(s) for v, s in self.adj.items()}
        w.top = self.top
        return w

    def __len__(self):
        return len(self.adj)

    def __contains__(self, v):
        return v in self.adj

    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def fresh(self) -> int:
        self.top += 1
        self.adj[self.top] = set()
        return self.top

    def add_edge(self, u: int, v: int):
        if u != v:
            self.adj[u].add(v)
            self.adj[v].add(u)

    def remove_edge(self, u: int, v: int):
        self.adj[u].discard(v)
        self.adj[v].discard(u)

    def remove(self, vs: Iterable[int]):
        for v in list(vs):
            for w in self.adj.pop(v, ()):
                if w in self.adj:
                    self.adj[w].discard(v)

    def has_edge(self, u, v) -> bool:
        return v in self.adj.get(u, ())

    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj.values()) // 2

    def freeze(self) -> tuple[Graph, dict[int, int]]:
        order = sorted(self.adj)
        mp = {v: i for i, v in enumerate(order, 1)}
        edges = {norm_edge(mp[u], mp[v]) for u in order for v in self.adj[u]}
        return Graph(len(order), frozenset(edges)), mp

    @classmethod
    def from_instance(cls, inst: Instance) -> "WorkGraph":
        return cls(inst.graph)


def emit(wg: WorkGraph, pairs, problem: str, clique=None, tree=None) -> tuple[Instance, dict]:
    """Freeze a working graph plus pairs into a dense Instance."""
    g, mp = wg.freeze()
    new_pairs = tuple((mp[s], mp[t]) for s, t in pairs)
    cl = frozenset(mp[v] for v in clique if v in mp) if clique is not None else None
    pt = None
    if tree is not None:
        bags, tedges = tree
        pt = PartitionTree.build({b: {mp[v] for v in vs} for b, vs in bags.items()}, tedges)
    return Instance(g, new_pairs, problem, cl, pt), mp
