"""Desk-scale benchmark generation and comparative runs.

Benchmarks are derived from intended formulas: a random sample is generated
and classified by evaluation, then a sketch is cut out of the formula either
by replacing a large subformula with a Type-0 placeholder or by replacing a
single operator with a Type-1/2 placeholder.  Runs record, per instance and
algorithm, the verdict, timing, sizes, and whether the intended formula was
recovered syntactically.
"""

from __future__ import annotations

import csv
import io
import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .formulas import (
    HOLE0,
    HOLE1,
    HOLE2,
    DagBuilder,
    Sample,
    SyntaxDag,
    apply_substitution,
    arity,
    check_consistency,
    dag_size,
    evaluate,
)
from .sketching import (
    COMPLETED,
    Limits,
    SketchResult,
    complete_incremental,
    complete_via_learning,
)
from .textio import format_formula, parse_formula
from .words import LassoWord, canonicalize

# Classic property shapes used as intended formulas when none are supplied.
DEFAULT_PATTERNS = (
    "F p",
    "G p",
    "G !p",
    "p U q",
    "G F p",
    "F G p",
    "F(p & q)",
    "!p U q",
    "G(p | q)",
    "G(p -> F q)",
    "G(p -> X F q)",
    "G(p -> X(q U r))",
)


class SampleGenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenParams:
    max_u: int = 8
    max_v: int = 4
    density: float = 0.5
    attempt_cap: int = 10_000


@dataclass(frozen=True)
class BenchInstance:
    id: str
    kind: str  # 'type0' | 'type12'
    intended: SyntaxDag
    sketch: SyntaxDag
    provenance: dict
    sample: Sample
    seed: int


@dataclass(frozen=True)
class BenchRecord:
    id: str
    kind: str
    algo: str
    status: str
    time_ms: int
    n_final: int | None
    formula: str
    dag_size: int | None
    vars: int
    clauses: int
    recovered: bool
    consistent: bool
    seed: int


CSV_COLUMNS = (
    "id", "kind", "algo", "status", "time_ms", "n_final", "formula",
    "dag_size", "vars", "clauses", "recovered", "consistent", "seed",
)


def _random_word(rng: random.Random, props, params: GenParams) -> LassoWord:
    u_len = rng.randint(0, params.max_u)
    v_len = rng.randint(1, params.max_v)
    draw = lambda: frozenset(p for p in props if rng.random() < params.density)
    return LassoWord(
        tuple(draw() for _ in range(u_len)),
        tuple(draw() for _ in range(v_len)),
    )


def generate_sample(
    f: SyntaxDag,
    positives: int,
    negatives: int,
    params: GenParams = GenParams(),
    seed: int = 0,
    props: tuple[str, ...] | None = None,
) -> Sample:
    """Random lasso words classified by evaluating the source formula.

    Deterministic for a fixed seed; raises when the attempt cap runs out
    before both classes are filled (near-tautological or contradictory
    formulas on this distribution).
    """
    if not f.is_concrete:
        raise ValueError("sample generation needs a placeholder-free formula")
    universe = props if props is not None else tuple(sorted(f.propositions()))
    if not universe:
        raise ValueError("formula mentions no propositions")
    rng = random.Random(seed)
    pos: list[LassoWord] = []
    neg: list[LassoWord] = []
    seen: set = set()
    attempts = 0
    while len(pos) < positives or len(neg) < negatives:
        if attempts >= params.attempt_cap:
            missing = "positive" if len(pos) < positives else "negative"
            raise SampleGenerationError(
                f"no new {missing} word found within {params.attempt_cap} attempts"
            )
        attempts += 1
        w = _random_word(rng, universe, params)
        canon = canonicalize(w)
        if canon in seen:
            continue
        if evaluate(f, w, universe):
            if len(pos) < positives:
                seen.add(canon)
                pos.append(w)
        elif len(neg) < negatives:
            seen.add(canon)
            neg.append(w)
    return Sample(universe, tuple(pos), tuple(neg))


def derive_sketch(
    f: SyntaxDag, kind: str, seed: int = 0
) -> tuple[SyntaxDag, dict]:
    """Cut a sketch out of a formula; the provenance records what was removed.

    ``type0`` replaces an arbitrary subformula of size at least half the
    formula with a Type-0 placeholder; ``type12`` replaces one arbitrary
    operator with a placeholder of matching arity.
    """
    rng = random.Random(seed)
    parents: dict[int, int] = {}
    for node in f.nodes:
        for k in (node.left, node.right):
            if k is not None:
                parents[k] = parents.get(k, 0) + 1
    if kind == "type0":
        threshold = len(f) // 2
        candidates = [
            i for i in range(len(f)) if dag_size(f.subdag(i)) >= threshold
        ]
        target = rng.choice(candidates)
        hole = "s" if parents.get(target, 0) > 1 else None
        b = DagBuilder()

        def rebuild(i: int, memo: dict) -> int:
            if i in memo:
                return memo[i]
            if i == target:
                out = b.add(HOLE0, hole=hole)
            else:
                n = f.nodes[i]
                kids = [rebuild(k, memo) for k in (n.left, n.right) if k is not None]
                out = b.add(n.label, *kids)
            memo[i] = out
            return out

        sketch = b.finish(rebuild(0, {}))
        hole_id = next(
            n.hole for n in sketch.nodes if n.label == HOLE0
        )
        return sketch, {"kind": kind, "hole": hole_id, "removed": f.subdag(target)}
    if kind == "type12":
        candidates = [i for i in range(len(f)) if arity(f.nodes[i].label) > 0]
        if not candidates:
            raise ValueError("formula has no operator to replace")
        target = rng.choice(candidates)
        removed = f.nodes[target].label
        hole_label = HOLE1 if arity(removed) == 1 else HOLE2
        b = DagBuilder()

        def rebuild12(i: int, memo: dict) -> int:
            if i in memo:
                return memo[i]
            n = f.nodes[i]
            kids = [rebuild12(k, memo) for k in (n.left, n.right) if k is not None]
            if i == target:
                out = b.add(hole_label, *kids, hole="s")
            else:
                out = b.add(n.label, *kids)
            memo[i] = out
            return out

        sketch = b.finish(rebuild12(0, {}))
        return sketch, {"kind": kind, "hole": "s", "removed": removed}
    raise ValueError(f"unknown sketch kind {kind!r}")


def restore_provenance(sketch: SyntaxDag, provenance: dict) -> SyntaxDag:
    """Substitute the removed content back into the derived sketch."""
    return apply_substitution(sketch, {provenance["hole"]: provenance["removed"]})


_ALGOS = {
    "learn": complete_via_learning,
    "incr": complete_incremental,
}


def run_instance(inst: BenchInstance, algo: str, limits: Limits) -> BenchRecord:
    start = time.monotonic()
    formula_text = ""
    size = None
    n_final = None
    recovered = False
    consistent = False
    cnf_vars = cnf_clauses = 0
    try:
        result: SketchResult = _ALGOS[algo](inst.sketch, inst.sample, limits)
        status = result.status
        n_final = result.n_final
        if result.iterations:
            cnf_vars = result.iterations[-1].cnf_vars
            cnf_clauses = result.iterations[-1].cnf_clauses
        if result.completed:
            formula_text = format_formula(result.formula)
            size = dag_size(result.formula)
            recovered = result.formula == inst.intended
            consistent = check_consistency(result.formula, inst.sample).ok
    except Exception as exc:  # noqa: BLE001  - suite must never abort
        status = f"error:{type(exc).__name__}"
    millis = int(round((time.monotonic() - start) * 1000.0))
    return BenchRecord(
        id=inst.id,
        kind=inst.kind,
        algo=algo,
        status=status,
        time_ms=millis,
        n_final=n_final,
        formula=formula_text,
        dag_size=size,
        vars=cnf_vars,
        clauses=cnf_clauses,
        recovered=recovered,
        consistent=consistent,
        seed=inst.seed,
    )


def _run_star(args):
    return run_instance(*args)


def run_suite(
    instances,
    algorithms=("learn", "incr"),
    limits: Limits = Limits(),
    jobs: int = 1,
) -> list[BenchRecord]:
    tasks = [(inst, algo, limits) for inst in instances for algo in algorithms]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_star, tasks))
    return [run_instance(*t) for t in tasks]


def records_to_csv(records) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([
            rec.id, rec.kind, rec.algo, rec.status, rec.time_ms,
            "" if rec.n_final is None else rec.n_final,
            rec.formula,
            "" if rec.dag_size is None else rec.dag_size,
            rec.vars, rec.clauses,
            str(rec.recovered).lower(), str(rec.consistent).lower(), rec.seed,
        ])
    return out.getvalue()


def records_to_json(records) -> str:
    rows = [
        {
            "id": rec.id,
            "kind": rec.kind,
            "algo": rec.algo,
            "status": rec.status,
            "time_ms": rec.time_ms,
            "n_final": rec.n_final,
            "formula": rec.formula,
            "dag_size": rec.dag_size,
            "vars": rec.vars,
            "clauses": rec.clauses,
            "recovered": rec.recovered,
            "consistent": rec.consistent,
            "seed": rec.seed,
        }
        for rec in records
    ]
    return json.dumps(rows, indent=2, sort_keys=True) + "\n"


def make_instances(
    count: int,
    kind: str = "type12",
    seed: int = 0,
    patterns=DEFAULT_PATTERNS,
    positives: int = 3,
    negatives: int = 3,
    params: GenParams = GenParams(),
) -> list[BenchInstance]:
    """A deterministic batch of benchmark instances over the pattern stock."""
    instances = []
    made = 0
    attempt = 0
    while made < count:
        pattern = patterns[attempt % len(patterns)]
        inst_seed = seed + attempt
        attempt += 1
        intended = parse_formula(pattern)
        try:
            sample = generate_sample(
                intended, positives, negatives, params, seed=inst_seed
            )
            inst_kind = kind
            if kind == "both":
                inst_kind = "type0" if attempt % 2 else "type12"
            sketch, provenance = derive_sketch(intended, inst_kind, seed=inst_seed)
        except (SampleGenerationError, ValueError):
            continue
        instances.append(
            BenchInstance(
                id=f"inst{made:04d}",
                kind=inst_kind,
                intended=intended,
                sketch=sketch,
                provenance=provenance,
                sample=sample,
                seed=inst_seed,
            )
        )
        made += 1
    return instances
