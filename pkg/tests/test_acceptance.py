"""Acceptance suite: one test per criterion, each recording a pass/fail line
that the session summary prints. Run standalone with `python tests/test_acceptance.py`."""
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from dpkernel import edp_block, edp_cliquepath, edp_threshold, vdp_split, vdp_wpc
from dpkernel.cli import PIPELINES, verify_equivalence
from dpkernel.edp_split import clique_edp_construct
from dpkernel.gen import generate, sample
from dpkernel.hardness import completeify_edp
from dpkernel.oracle import Infeasible, check_solution, minimum_solution, solve_exact
from dpkernel.polysolve import solve_block_vdp, solve_threshold_vdp
from dpkernel.vdp_split import kernelize_split_vdp
from helpers import answer, complete_edges, make
from report import RESULTS, record

SEEDS = 500
N_RANGE = (4, 12)
K_RANGE = (1, 4)
WPC_K_RANGE = (1, 3)
MAX_MISMATCHES = 0
MAX_VIOLATIONS = 0
MIN_CAUGHT_MUTANTS = 3


def _k_range(pl):
    return WPC_K_RANGE if pl.cls == "wpc" else K_RANGE


_reports: dict = {}


def equivalence_reports():
    """Criterion 1 and 2 share one batch per pipeline."""
    if not _reports:
        for name, pl in PIPELINES.items():
            _reports[name] = [
                verify_equivalence(sample(pl.cls, pl.problem, seed, N_RANGE, _k_range(pl)), pl, oracle_below=0)
                for seed in range(SEEDS)
            ]
    return _reports


def test_criterion_1_equivalence():
    reps = equivalence_reports()
    parts, bad, budget = [], 0, 0
    for name, rs in reps.items():
        mm = sum(r.match is False for r in rs)
        bad += mm
        budget += sum(r.match is None for r in rs)
        parts.append(f"{name} {mm}/{len(rs)}")
    ok = bad <= MAX_MISMATCHES and budget == 0
    record(1, ok, f"mismatches {', '.join(parts)}; over budget {budget} (tolerance {MAX_MISMATCHES})")
    assert ok


def test_criterion_2_size_bounds():
    reps = equivalence_reports()
    parts, bad = [], 0
    for name, rs in reps.items():
        reduced = [r for r in rs if r.status == "reduced"]
        viol = [r for r in reduced if not r.bounds_ok]
        bad += len(viol)
        parts.append(f"{name} {len(viol)}/{len(reduced)}")
    # the explicit vertex bounds, recomputed from the kernels themselves
    for r in reps["edp-threshold"]:
        if r.status == "reduced":
            bad += r.kernel_n > 7 * r.kernel_k + 1
    for r in reps["edp-cliquepath"]:
        if r.status == "reduced":
            bad += r.kernel_n > 2 * r.kernel_k + 1
    for r in reps["edp-block"]:
        if r.status == "reduced":
            bad += r.kernel_n > 4 * r.kernel_k ** 2 - 2 * r.kernel_k
    ok = bad <= MAX_VIOLATIONS
    record(2, ok, f"violations over reduced outcomes {', '.join(parts)} (tolerance {MAX_VIOLATIONS})")
    assert ok


def test_criterion_3_clique_construction():
    fails = 0
    for seed in range(SEEDS):
        rng = random.Random(seed)
        n = rng.randint(2, 12)
        k = rng.randint(1, n - 1)
        pairs = [tuple(rng.sample(range(1, n + 1), 2)) for _ in range(k)]
        inst = make(n, complete_edges(range(1, n + 1)), pairs)
        fails += bool(check_solution(inst, clique_edp_construct(inst)))
    tight = {k: answer(make(k, complete_edges(range(1, k + 1)), [(1, 2)] * k)) for k in range(2, 7)}
    ok = fails == 0 and all(a == "no" for a in tight.values())
    record(3, ok, f"construction failures {fails}/{SEEDS}; tight family answers {tight} (all must be no)")
    assert ok


def test_criterion_4_path_lengths():
    yes = long_paths = heavy_totals = 0
    for seed in range(SEEDS):
        inst = sample("split", "edp", seed, (4, 10), K_RANGE)
        sol = minimum_solution(inst)
        if isinstance(sol, Infeasible):
            continue
        yes += 1
        k = inst.k
        long_paths += any(len(p) - 1 >= 4 * math.sqrt(k) + 4 for p in sol.paths)
        heavy_totals += sol.total_edges > 5 * k ** 1.5
    ok = yes > 0 and long_paths == 0 and heavy_totals == 0
    record(4, ok, f"{yes} yes-instances; paths with length >= 4*sqrt(k)+4: {long_paths}; "
                  f"totals above 5k^1.5: {heavy_totals} (tolerance 0)")
    assert ok


def _induced(g, p) -> bool:
    return not any(g.has_edge(p[i], p[j]) for i in range(len(p)) for j in range(i + 2, len(p)))


def test_criterion_5_minimum_solution_structure():
    yes = shape_bad = edge_bad = 0
    for cls in ("clique", "split", "threshold", "block", "cliquepath", "wpc"):
        for seed in range(SEEDS // 5):
            inst = sample(cls, "vdp", seed, (4, 10), K_RANGE)
            sol = minimum_solution(inst)
            if isinstance(sol, Infeasible):
                continue
            yes += 1
            g = inst.graph
            direct = {frozenset(p) for p in sol.paths if len(p) == 2}
            for p in sol.paths:
                ok = _induced(g, p) or (len(p) == 3 and frozenset((p[0], p[-1])) in direct)
                shape_bad += not ok
            for s, t in inst.pairs:
                if g.has_edge(s, t) and frozenset((s, t)) not in direct:
                    edge_bad += 1
    ok = yes > 0 and shape_bad == 0 and edge_bad == 0
    record(5, ok, f"{yes} yes-instances over six chordal classes; non-induced paths without a parallel edge "
                  f"path: {shape_bad}; adjacent pairs missing the edge path: {edge_bad} (tolerance 0)")
    assert ok


def test_criterion_6_poly_solvers():
    dis = {"threshold": 0, "block": 0}
    for cls, solver in (("threshold", solve_threshold_vdp), ("block", solve_block_vdp)):
        for seed in range(SEEDS):
            inst = sample(cls, "vdp", seed, N_RANGE, K_RANGE)
            res = solver(inst)
            truth = solve_exact(inst)
            if isinstance(res, Infeasible) != isinstance(truth, Infeasible):
                dis[cls] += 1
    fig = make(4, [(1, 2), (1, 3), (2, 4)], [(1, 3), (1, 3)], "vdp", clique={1, 2})
    fig_ok = isinstance(solve_block_vdp(fig), Infeasible) and isinstance(solve_exact(fig), Infeasible)
    ok = sum(dis.values()) == 0 and fig_ok
    record(6, ok, f"disagreements threshold {dis['threshold']}/{SEEDS}, block {dis['block']}/{SEEDS}; "
                  f"two copies of a pendant pair infeasible: {fig_ok}")
    assert ok


def test_criterion_7_completion():
    trials = 300
    mm = 0
    classes = ("clique", "split", "threshold", "block", "cliquepath", "wpc")
    for seed in range(trials):
        rng = random.Random(seed)
        inst = generate(rng.choice(classes), "edp", rng.randint(2, 7), rng.randint(1, 3),
                        rng.choice((0.3, 0.6)), seed)
        mm += answer(inst) != answer(completeify_edp(inst))
    ok = mm == 0
    record(7, ok, f"mismatches {mm}/{trials} (tolerance 0)")
    assert ok


def test_criterion_8_unique_terminals():
    reduced = viol = 0
    for seed in range(SEEDS):
        inst = sample("split", "vdp", seed, N_RANGE, K_RANGE)
        out = kernelize_split_vdp(inst)
        if out.status != "reduced":
            continue
        reduced += 1
        red = out.instance
        many = any(c > 1 for c in red.occurrences.values())
        heavy = any(red.is_heavy(s, t) for s, t in red.pairs)
        viol += many or heavy
    ok = reduced > 0 and viol == 0
    record(8, ok, f"violations {viol}/{reduced} reduced outcomes of {SEEDS} instances (tolerance 0)")
    assert ok


MUTANTS = [
    # name, module, attribute, replacement, pipeline
    ("threshold cut keeps 4k", edp_threshold, "kept_free", lambda k: 4 * k, "edp-threshold"),
    ("block contraction at equality", edp_block, "rrb3_contracts", lambda size, demand: size >= demand, "edp-block"),
    ("clique-path refutation off by one", edp_cliquepath, "rrc3_refutes",
     lambda size, t: size <= max(t.a + t.b, t.a + t.c) + 1, "edp-cliquepath"),
    ("mixed adjacent pair keeps its edge", vdp_split, "rr1_cut", lambda wg, s, t: None, "vdp-split"),
    ("light pair leaves stranded terminals", vdp_wpc, "stranded", lambda st, s, t: [], "vdp-wpc"),
]


def first_mismatch(pipeline: str):
    pl = PIPELINES[pipeline]
    for seed in range(SEEDS):
        inst = sample(pl.cls, pl.problem, seed, N_RANGE, _k_range(pl))
        if verify_equivalence(inst, pl, oracle_below=0).match is False:
            return seed
    return None


def test_criterion_9_mutation_sensitivity(monkeypatch):
    caught, missed = [], []
    for name, mod, attr, fn, pipeline in MUTANTS:
        with monkeypatch.context() as m:
            m.setattr(mod, attr, fn)
            seed = first_mismatch(pipeline)
        (caught if seed is not None else missed).append(f"{name}" + (f" (seed {seed})" if seed is not None else ""))
    ok = len(caught) >= MIN_CAUGHT_MUTANTS
    record(9, ok, f"caught {len(caught)}/{len(MUTANTS)} (need {MIN_CAUGHT_MUTANTS}): {'; '.join(caught)}; "
                  f"not caught in {SEEDS} seeds: {'; '.join(missed) or 'none'}")
    assert ok


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_criterion_"):
            continue
        mp = pytest.MonkeyPatch()
        try:
            fn(mp) if fn.__code__.co_argcount else fn()
        except AssertionError:
            failed += 1
        finally:
            mp.undo()
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(1 if failed else 0)
