"""Command-line interface.

Exit codes: 0 = solution found / satisfiable / consistent; 1 = no solution /
unsatisfiable / inconsistent; 2 = usage or runtime error; 3 = timeout or
resource limit.  Results go to stdout, diagnostics to stderr.  With
``--format json`` the output is deterministic for fixed inputs and seed,
apart from elapsed-time fields.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import bench as B
from .encoding import EncodingError
from .formulas import Sample, check_consistency, dag_size
from .sketching import (
    COMPLETED,
    NO_SOLUTION,
    RESOURCE_LIMIT,
    TIMEOUT,
    Limits,
    complete_incremental,
    complete_via_learning,
    decide_existence,
    learn_minimal,
)
from .reduction import reduce_cnf
from .solver import SolverError
from .textio import (
    ParseError,
    format_formula,
    format_word,
    parse_formula,
    parse_word,
    read_dimacs,
    read_sample,
    write_sample,
)
from .formulas import build_table

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_LIMIT = 3


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_formula_file(path: str):
    lines = [
        line.split("#", 1)[0] for line in _read_text(path).splitlines()
    ]
    return parse_formula("\n".join(lines))


def _limits(args) -> Limits:
    return Limits(
        max_n=args.max_n,
        timeout=args.timeout,
        seed=args.seed,
        solver=args.solver,
    )


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _result_payload(result, command: str) -> dict:
    payload = {
        "command": command,
        "status": result.status,
        "formula": format_formula(result.formula) if result.formula else None,
        "dag_size": dag_size(result.formula) if result.formula else None,
        "n_final": result.n_final,
        "iterations": [
            {
                "n": it.n,
                "catalog_vars": it.catalog_vars,
                "cnf_vars": it.cnf_vars,
                "cnf_clauses": it.cnf_clauses,
                "status": it.status,
            }
            for it in result.iterations
        ],
        "elapsed_ms": round(result.elapsed_ms, 3),
    }
    return payload


def _result_exit(result) -> int:
    if result.status == COMPLETED:
        return EXIT_OK
    if result.status == NO_SOLUTION:
        return EXIT_NEGATIVE
    if result.status in (RESOURCE_LIMIT, TIMEOUT):
        return EXIT_LIMIT
    return EXIT_ERROR


def _cmd_decide(args) -> int:
    sketch = _load_formula_file(args.sketch)
    sample = read_sample(_read_text(args.sample))
    start = time.monotonic()
    try:
        exists = decide_existence(sketch, sample, args.restricted, _limits(args))
    except TimeoutError:
        print("timeout", file=sys.stderr)
        return EXIT_LIMIT
    elapsed = (time.monotonic() - start) * 1000.0
    _emit(
        args,
        {
            "command": "decide",
            "exists": exists,
            "restricted": args.restricted,
            "elapsed_ms": round(elapsed, 3),
        },
        ["solution exists" if exists else "no solution exists"],
    )
    return EXIT_OK if exists else EXIT_NEGATIVE


def _cmd_sketch(args) -> int:
    sketch = _load_formula_file(args.sketch)
    sample = read_sample(_read_text(args.sample))
    run = complete_via_learning if args.algo == "learn" else complete_incremental
    result = run(sketch, sample, _limits(args))
    lines = [f"status: {result.status}"]
    if result.completed:
        lines.append(f"formula: {format_formula(result.formula)}")
        lines.append(f"dag_size: {dag_size(result.formula)}")
        if result.n_final is not None:
            lines.append(f"n_final: {result.n_final}")
    _emit(args, _result_payload(result, "sketch"), lines)
    return _result_exit(result)


def _cmd_learn(args) -> int:
    sample = read_sample(_read_text(args.sample))
    result = learn_minimal(sample, _limits(args))
    lines = [f"status: {result.status}"]
    if result.completed:
        lines.append(f"formula: {format_formula(result.formula)}")
        lines.append(f"dag_size: {dag_size(result.formula)}")
        lines.append(f"n_final: {result.n_final}")
    _emit(args, _result_payload(result, "learn"), lines)
    return _result_exit(result)


def _cmd_eval(args) -> int:
    formula = _load_formula_file(args.formula)
    sample = read_sample(_read_text(args.sample))
    report = check_consistency(formula, sample)
    lines = []
    for i, ok in enumerate(report.positives_ok):
        lines.append(f"positive[{i}]: {'satisfied' if ok else 'VIOLATED'}")
    for i, ok in enumerate(report.negatives_ok):
        lines.append(f"negative[{i}]: {'rejected' if ok else 'VIOLATED'}")
    lines.append(f"consistent: {str(report.ok).lower()}")
    _emit(
        args,
        {
            "command": "eval",
            "consistent": report.ok,
            "positives_ok": list(report.positives_ok),
            "negatives_ok": list(report.negatives_ok),
        },
        lines,
    )
    return EXIT_OK if report.ok else EXIT_NEGATIVE


def _post_order(dag) -> list[int]:
    seen: set[int] = set()
    order: list[int] = []

    def visit(i: int) -> None:
        if i in seen:
            return
        seen.add(i)
        node = dag.nodes[i]
        for k in (node.left, node.right):
            if k is not None:
                visit(k)
        order.append(i)

    visit(0)
    return order


def _cmd_table(args) -> int:
    formula = parse_formula(args.formula)
    if not formula.is_concrete:
        raise ValueError("table needs a placeholder-free formula")
    word = parse_word(args.word)
    table = build_table(formula, word)
    order = _post_order(formula)
    texts = {i: format_formula(formula.subdag(i)) for i in order}
    width = max(len(t) for t in texts.values())
    lines = [f"{texts[i]:<{width}}  {table.bits(i)}" for i in order]
    _emit(
        args,
        {
            "command": "table",
            "word": format_word(word, tuple(sorted(word.propositions()))),
            "rows": [{"formula": texts[i], "bits": table.bits(i)} for i in order],
        },
        lines,
    )
    return EXIT_OK


def _cmd_reduce(args) -> int:
    cnf = read_dimacs(_read_text(args.dimacs))
    inst = reduce_cnf(cnf)
    if inst.trivially_unsat:
        print(
            "input contains an empty clause; the instance is unsatisfiable",
            file=sys.stderr,
        )
        return EXIT_NEGATIVE
    sketch_path = Path(args.out + ".sketch")
    sample_path = Path(args.out + ".sample")
    sketch_path.write_text(format_formula(inst.sketch) + "\n", encoding="utf-8")
    sample_path.write_text(write_sample(inst.sample), encoding="utf-8")
    _emit(
        args,
        {
            "command": "reduce",
            "sketch_file": str(sketch_path),
            "sample_file": str(sample_path),
            "variables": cnf.num_vars,
            "clauses": len(cnf.clauses),
        },
        [f"wrote {sketch_path} and {sample_path}"],
    )
    return EXIT_OK


def _cmd_bench_gen(args) -> int:
    params = B.GenParams(max_u=args.max_u, max_v=args.max_v, density=args.density)
    instances = B.make_instances(
        args.count,
        kind=args.kind,
        seed=args.seed,
        positives=args.positives,
        negatives=args.negatives,
        params=params,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for inst in instances:
        (out / f"{inst.id}.sketch").write_text(
            format_formula(inst.sketch) + "\n", encoding="utf-8"
        )
        (out / f"{inst.id}.sample").write_text(write_sample(inst.sample), encoding="utf-8")
        manifest.append(
            {
                "id": inst.id,
                "kind": inst.kind,
                "intended": format_formula(inst.intended),
                "sketch_file": f"{inst.id}.sketch",
                "sample_file": f"{inst.id}.sample",
                "seed": inst.seed,
            }
        )
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(instances)} instances to {out}", file=sys.stderr)
    return EXIT_OK


def _cmd_bench_run(args) -> int:
    directory = Path(args.dir)
    manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    instances = []
    for entry in manifest:
        sketch = _load_formula_file(str(directory / entry["sketch_file"]))
        sample = read_sample((directory / entry["sample_file"]).read_text(encoding="utf-8"))
        instances.append(
            B.BenchInstance(
                id=entry["id"],
                kind=entry["kind"],
                intended=parse_formula(entry["intended"]),
                sketch=sketch,
                provenance={},
                sample=sample,
                seed=entry["seed"],
            )
        )
    algorithms = tuple(a for a in args.algos.split(",") if a)
    for algo in algorithms:
        if algo not in ("learn", "incr"):
            raise ValueError(f"unknown algorithm {algo!r}")
    records = B.run_suite(instances, algorithms, _limits(args), jobs=args.jobs)
    Path(args.out + ".csv").write_text(B.records_to_csv(records), encoding="utf-8")
    Path(args.out + ".json").write_text(B.records_to_json(records), encoding="utf-8")
    done = sum(1 for r in records if r.status == COMPLETED)
    print(
        f"{len(records)} runs, {done} completed; wrote {args.out}.csv and {args.out}.json",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltlsketch",
        description="Complete partial LTL specifications against example words.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="solver seed")
    common.add_argument("--timeout", type=float, default=None, help="seconds")
    common.add_argument("--max-n", type=int, default=30, dest="max_n",
                        help="largest completion size to try")
    common.add_argument("--solver", default=None,
                        help="external DIMACS solver binary (default: embedded; "
                             "env LTLSKETCH_SOLVER)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", parents=[common],
                       help="does any completion fit the sample?")
    p.add_argument("--sketch", required=True)
    p.add_argument("--sample", required=True)
    p.add_argument("--restricted", action="store_true",
                   help="Type-0 placeholders may only become propositions")
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("sketch", parents=[common], help="complete a sketch")
    p.add_argument("--algo", choices=("learn", "incr"), required=True)
    p.add_argument("--sketch", required=True)
    p.add_argument("--sample", required=True)
    p.set_defaults(func=_cmd_sketch)

    p = sub.add_parser("learn", parents=[common],
                       help="learn a minimal consistent formula")
    p.add_argument("--sample", required=True)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("eval", parents=[common],
                       help="check a formula against a sample")
    p.add_argument("--formula", required=True, help="formula file")
    p.add_argument("--sample", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("table", parents=[common],
                       help="print the satisfaction table of a formula on a word")
    p.add_argument("--formula", required=True, help="formula text")
    p.add_argument("--word", required=True, help="word text, e.g. '{p} | {q}'")
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("reduce", parents=[common],
                       help="turn a DIMACS CNF into a sketch/sample instance")
    p.add_argument("--dimacs", required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("bench", parents=[], help="benchmark utilities")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)

    g = bench_sub.add_parser("gen", parents=[common], help="generate instances")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--count", type=int, default=12)
    g.add_argument("--kind", choices=("type0", "type12", "both"), default="both")
    g.add_argument("--positives", type=int, default=3)
    g.add_argument("--negatives", type=int, default=3)
    g.add_argument("--max-u", type=int, default=8, dest="max_u")
    g.add_argument("--max-v", type=int, default=4, dest="max_v")
    g.add_argument("--density", type=float, default=0.5)
    g.set_defaults(func=_cmd_bench_gen)

    r = bench_sub.add_parser("run", parents=[common], help="run instances")
    r.add_argument("--dir", required=True, help="directory from 'bench gen'")
    r.add_argument("--algos", default="learn,incr")
    r.add_argument("--out", default="bench_results", help="output path prefix")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=_cmd_bench_run)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParseError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (SolverError, EncodingError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
