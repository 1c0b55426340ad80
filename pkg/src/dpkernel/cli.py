"""Command-line front end: recognize, kernelize, solve, gen, transform,
verify and bench."""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .classes import recognize
from .core import InstanceFormatError, parse_instance, serialize_instance, serialize_outcome
from .edp_block import kernelize_block_edp
from .edp_cliquepath import kernelize_cliquepath_edp
from .edp_split import PreconditionError, SplitConstants, kernelize_split_edp
from .edp_threshold import kernelize_threshold_edp
from .gen import CLASSES, generate, plant_solution, sample
from .hardness import completeify_edp
from .oracle import DEFAULT_BUDGET, BudgetExceeded, Infeasible, check_solution, solve_exact
from .polysolve import solve_block_vdp, solve_threshold_vdp
from .vdp_split import kernelize_split_vdp
from .vdp_wpc import kernelize_wpc_vdp

EXIT_YES, EXIT_NO, EXIT_REDUCED, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = range(6)


@dataclass(frozen=True)
class Pipeline:
    name: str
    problem: str
    cls: str
    run: object  # (instance, options dict) -> KernelOutcome


PIPELINES = {
    p.name: p
    for p in (
        Pipeline("edp-split", "edp", "split", lambda i, o: kernelize_split_edp(
            i, o.get("constants"), o.get("oracle_below", 8), o.get("budget", DEFAULT_BUDGET))),
        Pipeline("edp-threshold", "edp", "threshold", lambda i, o: kernelize_threshold_edp(i)),
        Pipeline("edp-block", "edp", "block", lambda i, o: kernelize_block_edp(i)),
        Pipeline("edp-cliquepath", "edp", "cliquepath", lambda i, o: kernelize_cliquepath_edp(i)),
        Pipeline("vdp-split", "vdp", "split", lambda i, o: kernelize_split_vdp(
            i, o.get("resolve", False), o.get("budget", DEFAULT_BUDGET))),
        Pipeline("vdp-wpc", "vdp", "wpc", lambda i, o: kernelize_wpc_vdp(i)),
    )
}

# most specific class first
_PREFERENCE = ("cliquepath", "block", "threshold", "split")


def pick_pipeline(inst, cls: str | None) -> Pipeline:
    if cls is None:
        if inst.tree is not None and inst.problem == "vdp":
            cls = "wpc"
        else:
            found = recognize(inst.graph)
            cls = next((c for c in _PREFERENCE if c in found and f"{inst.problem}-{c}" in PIPELINES), None)
            if cls is None:
                raise PreconditionError(f"no {inst.problem} pipeline for a graph in classes {found or ['none']}")
    name = f"{inst.problem}-{cls}"
    if name not in PIPELINES:
        raise PreconditionError(f"no pipeline for {inst.problem} on {cls}")
    return PIPELINES[name]


def _answer(inst, budget) -> str:
    try:
        return "no" if isinstance(solve_exact(inst, budget), Infeasible) else "yes"
    except BudgetExceeded:
        return "budget"


@dataclass
class Report:
    original: str
    kernel: str
    status: str
    sizes: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    kernel_n: int | None = None
    kernel_k: int | None = None
    rules_fired: list = field(default_factory=list)

    @property
    def match(self) -> bool | None:
        if "budget" in (self.original, self.kernel):
            return None
        return self.original == self.kernel

    @property
    def bounds_ok(self) -> bool:
        return all(self.checks.values())


def verify_equivalence(inst, pipeline: str | Pipeline, budget: int = DEFAULT_BUDGET, **options) -> Report:
    """Oracle answer on the input against the answer the pipeline implies."""
    pl = PIPELINES[pipeline] if isinstance(pipeline, str) else pipeline
    original = _answer(inst, budget)
    out = pl.run(inst, dict(options, budget=budget))
    if out.witness is not None and check_solution(inst, out.witness):
        kernel = "bad-witness"
    elif out.status == "reduced":
        kernel = _answer(out.instance, budget)
    else:
        kernel = out.status
    info = out.info or {}
    kn = out.instance.n if out.instance is not None else 0
    kk = out.instance.k if out.instance is not None else 0
    return Report(original, kernel, out.status, info.get("sizes", {}), info.get("checks", {}),
                  out.trace.lines(), kn, kk, out.trace.fired())


# ------------------------------------------------------------------ commands

def _read(path: str):
    with (sys.stdin if path == "-" else open(path)) as fh:
        return parse_instance(fh.read())


def _constants(text: str | None) -> SplitConstants | None:
    if not text:
        return None
    vals = {}
    for part in text.split(","):
        key, _, val = part.partition("=")
        if key not in ("rich", "quota") or not val.isdigit():
            raise PreconditionError(f"bad --constants entry {part!r}; use rich=R,quota=Q")
        vals[key] = int(val)
    return SplitConstants(vals.get("rich"), vals.get("quota"))


def _ledger_comments(info: dict) -> list[str]:
    out = list(info.get("comments", []))
    for name, (val, bound) in info.get("sizes", {}).items():
        out.append(f"size {name} {val}" + (f" <= {bound:g}" if bound is not None else ""))
    for name, ok in info.get("checks", {}).items():
        out.append(f"check {name} {'ok' if ok else 'FAIL'}")
    return out


def cmd_recognize(args) -> int:
    inst = _read(args.file)
    found = recognize(inst.graph)
    print(" ".join(found) if found else "none")
    return EXIT_YES


def cmd_kernelize(args) -> int:
    inst = _read(args.file)
    if args.problem and args.problem != inst.problem:
        raise PreconditionError(f"file holds a {inst.problem} instance, not {args.problem}")
    pl = pick_pipeline(inst, args.cls)
    out = pl.run(inst, {"constants": _constants(args.constants), "oracle_below": args.oracle_below,
                        "resolve": args.resolve, "budget": args.budget})
    sys.stdout.write(serialize_outcome(out, _ledger_comments(out.info or {})))
    return {"yes": EXIT_YES, "no": EXIT_NO}.get(out.status, EXIT_REDUCED)


def _write_solution(res) -> int:
    if isinstance(res, Infeasible):
        print("RESULT no")
        print(f"# reason: {res.reason}")
        return EXIT_NO
    print("RESULT yes")
    print("WITNESS")
    for p in res.paths:
        print(" ".join(map(str, p)))
    return EXIT_YES


def cmd_solve(args) -> int:
    inst = _read(args.file)
    if args.poly:
        found = recognize(inst.graph)
        if inst.problem == "vdp" and "threshold" in found:
            return _write_solution(solve_threshold_vdp(inst))
        if inst.problem == "vdp" and "block" in found and inst.graph.is_connected():
            return _write_solution(solve_block_vdp(inst))
        print(f"no polynomial solver for {inst.problem} on classes {found or ['none']}; using the exact search",
              file=sys.stderr)
    return _write_solution(solve_exact(inst, args.budget))


def cmd_gen(args) -> int:
    if args.planted:
        inst, sol = plant_solution(args.cls, args.problem, args.n, args.k, args.density, args.seed)
        if args.witness:
            with open(args.witness, "w") as fh:
                fh.write("".join(" ".join(map(str, p)) + "\n" for p in sol.paths))
    else:
        inst = generate(args.cls, args.problem, args.n, args.k, args.density, args.seed)
    sys.stdout.write(serialize_instance(inst, [f"class {args.cls} seed {args.seed}"]))
    return EXIT_YES


def cmd_transform(args) -> int:
    inst = _read(args.file)
    sys.stdout.write(serialize_instance(completeify_edp(inst), ["completion of every missing edge"]))
    return EXIT_YES


def _batch_item(job):
    pname, seed, opts, check = job
    pl = PIPELINES[pname]
    inst = sample(pl.cls, pl.problem, seed, tuple(opts["n_range"]), tuple(opts["k_range"]))
    t0 = time.perf_counter()
    row = {"seed": seed, "class": pl.cls, "problem": pl.problem, "n": inst.n, "m": inst.graph.m, "k": inst.k}
    if check:
        rep = verify_equivalence(inst, pl, opts["budget"], oracle_below=opts["oracle_below"],
                                 constants=opts.get("constants"))
        row.update(answer=rep.kernel, original=rep.original, match=rep.match, bounds_ok=rep.bounds_ok,
                   kernel_n=rep.kernel_n, kernel_k=rep.kernel_k, rules_fired=rep.rules_fired)
    else:
        out = pl.run(inst, {"oracle_below": opts["oracle_below"], "budget": opts["budget"],
                            "constants": opts.get("constants")})
        row.update(answer=out.status, kernel_n=out.instance.n if out.instance else 0,
                   kernel_k=out.instance.k if out.instance else 0, rules_fired=out.trace.fired())
    row["wall_ms"] = round((time.perf_counter() - t0) * 1000, 3)
    return row


def _batch(args, check: bool) -> int:
    names = list(PIPELINES) if args.pipeline == "all" else [args.pipeline]
    opts = {"n_range": args.n_range, "k_range": args.k_range, "budget": args.budget,
            "oracle_below": args.oracle_below, "constants": _constants(args.constants)}
    jobs = [(p, args.seed + i, opts, check) for p in names for i in range(args.trials)]
    mismatch = budget = bad_bounds = 0
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = ex.map(_batch_item, jobs, chunksize=8)
            for row in rows:
                sys.stdout.write(json.dumps(row) + "\n")
                mismatch += row.get("match") is False
                budget += row.get("match", True) is None
                bad_bounds += row.get("bounds_ok") is False
    else:
        for job in jobs:
            row = _batch_item(job)
            sys.stdout.write(json.dumps(row) + "\n")
            mismatch += row.get("match") is False
            budget += row.get("match", True) is None
            bad_bounds += row.get("bounds_ok") is False
    if check:
        print(f"# {len(jobs)} trials, {mismatch} mismatches, {bad_bounds} bound violations, "
              f"{budget} over budget", file=sys.stderr)
        if mismatch or bad_bounds:
            return EXIT_MISMATCH
        if budget:
            return EXIT_BUDGET
    return EXIT_YES


def cmd_verify(args) -> int:
    if args.file:
        inst = _read(args.file)
        pl = PIPELINES[args.pipeline] if args.pipeline != "all" else pick_pipeline(inst, None)
        rep = verify_equivalence(inst, pl, args.budget, oracle_below=args.oracle_below,
                                 constants=_constants(args.constants))
        print(json.dumps({"pipeline": pl.name, "original": rep.original, "kernel": rep.kernel,
                          "status": rep.status, "match": rep.match, "bounds_ok": rep.bounds_ok,
                          "sizes": rep.sizes, "rules_fired": rep.rules_fired}))
        if rep.match is None:
            return EXIT_BUDGET
        return EXIT_YES if rep.match and rep.bounds_ok else EXIT_MISMATCH
    return _batch(args, check=True)


def cmd_bench(args) -> int:
    return _batch(args, check=False)


def _range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    return int(lo), int(hi or lo)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dpkernel", description="Kernels and exact solvers for disjoint paths.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recognize", help="print the graph classes of an instance")
    p.add_argument("file")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("kernelize", help="run a kernelization pipeline")
    p.add_argument("file")
    p.add_argument("--problem", choices=("edp", "vdp"))
    p.add_argument("--class", dest="cls", choices=("split", "threshold", "block", "cliquepath", "wpc"))
    p.add_argument("--resolve", action="store_true", help="solve the unique-terminal VDP instance exactly")
    p.add_argument("--constants", help="split EDP marking knobs, e.g. rich=20,quota=2")
    p.add_argument("--oracle-below", type=int, default=8, help="split EDP: solve exactly when k is below this")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("solve", help="decide an instance and print a witness")
    p.add_argument("file")
    p.add_argument("--poly", action="store_true", help="use the polynomial solver for the recognized class")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    p.add_argument("--problem", choices=("edp", "vdp"), default="edp")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--planted", nargs="?", const="yes", choices=("yes",), help="build the pairs from hidden disjoint paths")
    p.add_argument("--witness", help="with --planted, write the hidden paths here")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("transform", help="instance transformations")
    p.add_argument("kind", choices=("completeify",))
    p.add_argument("file")
    p.set_defaults(func=cmd_transform)

    for name, func, helptext in (("verify", cmd_verify, "compare pipeline answers with the exact search"),
                                 ("bench", cmd_bench, "time pipelines on generated instances")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("file", nargs="?") if name == "verify" else None
        p.add_argument("--pipeline", choices=sorted(PIPELINES) + ["all"], default="all")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n-range", type=_range, default=(4, 12), help="e.g. 4-12")
        p.add_argument("--k-range", type=_range, default=(1, 4), help="e.g. 1-4")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
        p.add_argument("--oracle-below", type=int, default=0)
        p.add_argument("--constants")
        p.add_argument("--jobs", type=int, default=1)
        p.set_defaults(func=func)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InstanceFormatError, PreconditionError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f"search budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
