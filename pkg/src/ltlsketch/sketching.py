"""Top-level decision procedure and the two sketch-completion algorithms.

``decide_existence`` answers whether any completion works at all.
``complete_via_learning`` turns a satisfying assignment of the existence
constraint into one minimal-formula learning problem per Type-0 placeholder.
``complete_incremental`` searches directly for completions of increasing
total size.  Every completed result is re-verified against the sample before
it is returned.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from . import prop as P
from .encoding import (
    EncodingError,
    decode_existence_model,
    decode_sized_model,
    encode_existence,
    encode_sized,
    encoding_stats,
)
from .formulas import (
    AND,
    HOLE0,
    NEXT,
    NOT,
    OR,
    DagBuilder,
    Sample,
    SyntaxDag,
    apply_substitution,
    check_consistency,
    dag_size,
)
from .solver import SolveOptions, SolveResult, solve
from .words import LassoWord, symbol_at

COMPLETED = "completed"
NO_SOLUTION = "no-solution"
RESOURCE_LIMIT = "resource-limit"
TIMEOUT = "timeout"


@dataclass(frozen=True)
class Limits:
    max_n: int = 30
    timeout: float | None = None
    seed: int = 0
    solver: str | None = None


@dataclass(frozen=True)
class IterationStats:
    n: int | None
    catalog_vars: int
    cnf_vars: int
    cnf_clauses: int
    status: str
    millis: float


@dataclass
class SketchResult:
    status: str
    formula: SyntaxDag | None = None
    n_final: int | None = None
    iterations: list[IterationStats] = field(default_factory=list)
    elapsed_ms: float = 0.0

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED


class _Budget:
    """Shared wall-clock budget across the SAT calls of one run."""

    def __init__(self, limits: Limits):
        self.limits = limits
        self.deadline = None if limits.timeout is None else (
            time.monotonic() + limits.timeout
        )

    def remaining(self) -> float | None:
        if self.deadline is None:
            return None
        return max(self.deadline - time.monotonic(), 0.0)

    def expired(self) -> bool:
        rem = self.remaining()
        return rem is not None and rem <= 0.0

    def options(self) -> SolveOptions:
        return SolveOptions(
            seed=self.limits.seed, timeout=self.remaining(),
            external=self.limits.solver,
        )


def _solve_constraint(constraint, cat, budget: _Budget):
    """Clausify and solve; returns (result, per-iteration stats)."""
    start = time.monotonic()
    cnf = P.tseitin(constraint, cat.pool.count)
    result = solve(cnf, budget.options())
    millis = (time.monotonic() - start) * 1000.0
    stats = IterationStats(
        n=cat.n,
        catalog_vars=cat.pool.count,
        cnf_vars=cnf.num_vars,
        cnf_clauses=len(cnf.clauses),
        status=result.status,
        millis=millis,
    )
    return result, stats


def decide_existence(
    sk: SyntaxDag, sample: Sample, restricted: bool = False, limits: Limits = Limits()
) -> bool:
    """True iff some (restricted) completion is consistent with the sample."""
    budget = _Budget(limits)
    constraint, cat = encode_existence(sk, sample, restricted)
    result, _ = _solve_constraint(constraint, cat, budget)
    if result.status == "timeout":
        raise TimeoutError("existence check timed out")
    return result.is_sat


def complete_via_learning(
    sk: SyntaxDag, sample: Sample, limits: Limits = Limits()
) -> SketchResult:
    """Complete a sketch by decoding the existence constraint and learning a
    minimal formula for each Type-0 placeholder's suffix labeling."""
    start = time.monotonic()
    budget = _Budget(limits)
    constraint, cat = encode_existence(sk, sample, restricted=False)
    result, stats = _solve_constraint(constraint, cat, budget)
    iterations = [stats]
    if result.status == "timeout":
        return SketchResult(TIMEOUT, iterations=iterations,
                            elapsed_ms=(time.monotonic() - start) * 1000.0)
    if not result.is_sat:
        return SketchResult(NO_SOLUTION, iterations=iterations,
                            elapsed_ms=(time.monotonic() - start) * 1000.0)
    decoding = decode_existence_model(result.model, cat, sk, sample)
    substitution: dict = dict(decoding.operators)
    for hole, labeling in decoding.labelings.items():
        pos = tuple(w for w, bit in labeling.items() if bit)
        neg = tuple(w for w, bit in labeling.items() if not bit)
        sub_sample = Sample(sample.props, pos, neg)
        inner_limits = Limits(
            max_n=limits.max_n,
            timeout=budget.remaining(),
            seed=limits.seed,
            solver=limits.solver,
        )
        learned = learn_minimal(sub_sample, inner_limits)
        iterations.extend(learned.iterations)
        if not learned.completed:
            return SketchResult(learned.status, iterations=iterations,
                                elapsed_ms=(time.monotonic() - start) * 1000.0)
        substitution[hole] = learned.formula
    formula = apply_substitution(sk, substitution)
    if not check_consistency(formula, sample).ok:
        raise EncodingError(
            "learning-based completion failed verification against the sample"
        )
    return SketchResult(
        COMPLETED,
        formula=formula,
        iterations=iterations,
        elapsed_ms=(time.monotonic() - start) * 1000.0,
    )


def complete_incremental(
    sk: SyntaxDag, sample: Sample, limits: Limits = Limits()
) -> SketchResult:
    """Complete a sketch by solving size-bounded constraints for growing
    bounds, after a one-shot existence check."""
    start = time.monotonic()
    budget = _Budget(limits)
    constraint, cat = encode_existence(sk, sample, restricted=False)
    result, stats = _solve_constraint(constraint, cat, budget)
    iterations = [stats]

    def finish(status, formula=None, n_final=None):
        return SketchResult(
            status,
            formula=formula,
            n_final=n_final,
            iterations=iterations,
            elapsed_ms=(time.monotonic() - start) * 1000.0,
        )

    if result.status == "timeout":
        return finish(TIMEOUT)
    if not result.is_sat:
        return finish(NO_SOLUTION)
    for n in range(len(sk), limits.max_n + 1):
        if budget.expired():
            return finish(TIMEOUT)
        constraint, cat = encode_sized(sk, sample, n)
        result, stats = _solve_constraint(constraint, cat, budget)
        iterations.append(stats)
        if result.status == "timeout":
            return finish(TIMEOUT)
        if result.is_sat:
            formula = decode_sized_model(result.model, cat, sk, n)
            return finish(COMPLETED, formula=formula, n_final=n)
    return finish(RESOURCE_LIMIT)


def learn_minimal(sample: Sample, limits: Limits = Limits()) -> SketchResult:
    """Minimal-size consistent formula, as completion of the trivial sketch."""
    if not sample.positives and not sample.negatives:
        raise ValueError("cannot learn from a sample with no words at all")
    b = DagBuilder()
    trivial = b.finish(b.add(HOLE0))
    return complete_incremental(trivial, sample, limits)


def generic_consistent_formula(sample: Sample) -> SyntaxDag:
    """A formula consistent with the sample by construction.

    For each positive/negative pair, a chain of next-operators addresses the
    first position where the words differ and a single literal separates
    them; the results are combined as an or-of-ands.
    """
    if not sample.positives or not sample.negatives:
        raise ValueError("construction needs both positive and negative words")
    b = DagBuilder()

    def separating(alpha: LassoWord, beta: LassoWord) -> int:
        bound = max(len(alpha.u), len(beta.u)) + math.lcm(len(alpha.v), len(beta.v))
        for d in range(bound):
            sa, sb = symbol_at(alpha, d), symbol_at(beta, d)
            if sa != sb:
                break
        else:
            raise ValueError(
                f"positive word {alpha!r} and negative word {beta!r} are equal"
            )
        only_pos = [p for p in sample.props if p in sa - sb]
        if only_pos:
            lit = b.add(only_pos[0])
        else:
            only_neg = [p for p in sample.props if p in sb - sa]
            lit = b.add(NOT, b.add(only_neg[0]))
        for _ in range(d):
            lit = b.add(NEXT, lit)
        return lit

    disjuncts = []
    for alpha in sample.positives:
        conj = None
        for beta in sample.negatives:
            phi = separating(alpha, beta)
            conj = phi if conj is None else b.add(AND, conj, phi)
        disjuncts.append(conj)
    root = disjuncts[0]
    for d in disjuncts[1:]:
        root = b.add(OR, root, d)
    return b.finish(root)
