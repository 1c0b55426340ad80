"""Seeded instance generators for each supported graph class."""
from __future__ import annotations

import random
from itertools import combinations

from .classes import (
    BlockDecomposition,
    SplitPartition,
    ThresholdOrder,
    block_decomposition,
    is_clique_path,
    split_partition,
    threshold_order,
    validate_partition_tree,
)
from .core import Graph, Instance, Ok, PartitionTree, Solution, norm_edge
from .oracle import check_solution

CLASSES = ("clique", "split", "threshold", "block", "cliquepath", "wpc")


def _relabel(n, edges, rng):
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    mp = {i + 1: perm[i] for i in range(n)}
    return [(mp[u], mp[v]) for u, v in edges], mp


def _clique(n, density, rng):
    return Graph.from_edges(n, combinations(range(1, n + 1), 2)), None


def _split(n, density, rng):
    c = rng.randint(1, max(1, n - 1))
    C = list(range(1, c + 1))
    edges = list(combinations(C, 2))
    for x in range(c + 1, n + 1):
        nb = [u for u in C if rng.random() < density] or [rng.choice(C)]
        edges += [(u, x) for u in nb]
    edges, mp = _relabel(n, edges, rng)
    return Graph.from_edges(n, edges), frozenset(mp[u] for u in C)


def _threshold(n, density, rng):
    # creation sequence: each new vertex is isolated or dominating
    edges = []
    for v in range(2, n + 1):
        if v == n or rng.random() < density:
            edges += [(u, v) for u in range(1, v)]
    edges, _ = _relabel(n, edges, rng)
    return Graph.from_edges(n, edges), None


def _block_sizes(n, rng, maxsize):
    return rng.randint(2, max(2, min(maxsize, n)))


def _block(n, density, rng, path_only=False):
    maxsize = 2 + int(density * 4)
    first = min(n, _block_sizes(n, rng, maxsize))
    verts = list(range(1, first + 1))
    edges = list(combinations(verts, 2))
    cut_count = {v: 0 for v in verts}
    last_block = list(verts)
    nxt = first + 1
    while nxt <= n:
        size = min(_block_sizes(n, rng, maxsize), n - nxt + 2)
        if path_only:
            free = [v for v in last_block if cut_count[v] == 0] or last_block
            at = rng.choice(free)
        else:
            at = rng.randint(1, nxt - 1)
        cut_count[at] = cut_count.get(at, 0) + 1
        block = [at] + list(range(nxt, nxt + size - 1))
        for v in block[1:]:
            cut_count[v] = 0
        edges += list(combinations(block, 2))
        nxt += size - 1
        last_block = block
    edges, _ = _relabel(n, edges, rng)
    return Graph.from_edges(n, edges), None


def _wpc(n, density, rng):
    nb = rng.randint(1, n)
    owner = list(range(nb)) + [rng.randrange(nb) for _ in range(n - nb)]
    rng.shuffle(owner)
    bags: dict = {}
    for v, b in enumerate(owner, 1):
        bags.setdefault(b + 1, []).append(v)
    tree = [(b, rng.randint(1, b - 1)) for b in range(2, nb + 1)]
    edges = []
    for vs in bags.values():
        edges += list(combinations(vs, 2))
    for a, b in tree:
        xa = [v for v in bags[a] if rng.random() < density] or [rng.choice(bags[a])]
        xb = [v for v in bags[b] if rng.random() < density] or [rng.choice(bags[b])]
        edges += [(u, v) for u in xa for v in xb]
    pt = PartitionTree.build(bags, tree)
    return Graph.from_edges(n, edges), pt


_BUILDERS = {
    "clique": _clique,
    "split": _split,
    "threshold": _threshold,
    "block": _block,
    "cliquepath": lambda n, d, r: _block(n, d, r, path_only=True),
    "wpc": _wpc,
}


def build_graph(cls: str, n: int, density: float, rng: random.Random):
    if cls not in _BUILDERS:
        raise ValueError(f"unknown class {cls!r}")
    if n < 1:
        raise ValueError("need n >= 1")
    g, aux = _BUILDERS[cls](n, density, rng)
    clique = tree = None
    if cls in ("split", "threshold"):
        clique = aux if aux is not None else split_partition(g).C
    if cls == "wpc":
        tree = aux
    _verify_class(cls, g, clique, tree)
    return g, clique, tree


def _verify_class(cls, g, clique, tree):
    ok = True
    if cls == "clique":
        ok = g.m == g.n * (g.n - 1) // 2
    elif cls == "split":
        ok = isinstance(split_partition(g), SplitPartition)
    elif cls == "threshold":
        ok = isinstance(threshold_order(g), ThresholdOrder)
    elif cls in ("block", "cliquepath"):
        d = block_decomposition(g)
        ok = isinstance(d, BlockDecomposition) and (cls == "block" or is_clique_path(d))
    elif cls == "wpc":
        ok = isinstance(validate_partition_tree(g, tree), Ok)
    if not ok:
        raise AssertionError(f"generator produced a graph outside class {cls}")


def random_pairs(g: Graph, k: int, rng: random.Random, repeat=0.25, adjacent=0.3):
    pairs: list = []
    edges = sorted(g.edges)
    for _ in range(k):
        r = rng.random()
        if pairs and r < repeat:
            s, t = rng.choice(pairs)
            if rng.random() < 0.5:
                s, t = t, s
        elif edges and r < repeat + adjacent:
            s, t = rng.choice(edges)
        else:
            s, t = rng.sample(range(1, g.n + 1), 2)
        pairs.append((s, t))
    return tuple(pairs)


def generate(cls: str, problem: str, n: int, k: int, density: float = 0.5, seed: int = 0,
             planted: bool = False) -> Instance:
    """A random instance of the class; with `planted` the pairs come from a
    hidden solution so the answer is Yes."""
    if planted:
        return plant_solution(cls, problem, n, k, density, seed)[0]
    if n < 2:
        raise ValueError("need n >= 2")
    rng = random.Random(f"{cls}:{problem}:{n}:{k}:{density}:{seed}")
    g, clique, tree = build_graph(cls, n, density, rng)
    return Instance(g, random_pairs(g, k, rng), problem, clique, tree)


def _random_path(g, rng, mode, used_edges, used_inner, endpoints, taken):
    s = rng.randint(1, g.n)
    if mode == "vdp" and s in used_inner:
        return None
    path = [s]
    want = rng.randint(1, max(1, g.n // 2))
    while len(path) <= want:
        cur = path[-1]
        opts = []
        for w in sorted(g.adj[cur]):
            if w in path:
                continue
            if mode == "edp" and norm_edge(cur, w) in used_edges:
                continue
            if mode == "vdp" and w in used_inner:
                continue
            opts.append(w)
        if not opts:
            break
        path.append(rng.choice(opts))
    if len(path) < 2:
        return None
    if mode == "vdp":
        if path[-1] in used_inner:
            return None
        if any(v in endpoints for v in path[1:-1]):
            return None
        key = min(tuple(path), tuple(reversed(path)))
        if key in taken:
            return None
    return tuple(path)


def plant_solution(cls: str, problem: str, n: int, k: int, density: float = 0.5, seed: int = 0,
                   attempts: int = 400):
    """A Yes-instance built around k randomly drawn disjoint paths, plus that witness."""
    rng = random.Random(f"plant:{cls}:{problem}:{n}:{k}:{density}:{seed}")
    g, clique, tree = build_graph(cls, n, density, rng)
    if k == 0:
        return Instance(g, (), problem, clique, tree), Solution((), problem)
    for _ in range(attempts):
        used_edges: set = set()
        used_inner: set = set()
        endpoints: set = set()
        taken: set = set()
        paths = []
        for _ in range(k):
            for _ in range(50):
                p = _random_path(g, rng, problem, used_edges, used_inner, endpoints, taken)
                if p:
                    break
            else:
                break
            paths.append(p)
            used_edges.update(norm_edge(a, b) for a, b in zip(p, p[1:]))
            used_inner.update(p[1:-1])
            endpoints.update((p[0], p[-1]))
            taken.add(min(p, tuple(reversed(p))))
        if len(paths) == k:
            inst = Instance(g, tuple((p[0], p[-1]) for p in paths), problem, clique, tree)
            sol = Solution(tuple(paths), problem)
            assert not check_solution(inst, sol)
            return inst, sol
    raise ValueError(f"could not plant {k} paths in this {cls} graph")


def sample(cls: str, problem: str, seed: int, n_range=(4, 12), k_range=(1, 4)) -> Instance:
    """The instance mix used by the batch checks: half planted, half random."""
    rng = random.Random(f"sample:{cls}:{problem}:{seed}")
    n = rng.randint(*n_range)
    k = rng.randint(*k_range)
    density = rng.choice((0.3, 0.5, 0.7))
    if rng.random() < 0.5:
        try:
            return generate(cls, problem, n, k, density, seed, planted=True)
        except ValueError:
            pass
    return generate(cls, problem, n, k, density, seed)
