"""Reduction from CNF satisfiability to restricted sketch completion.

A CNF over variables ``x_1..x_n`` becomes the sketch
``?_1 & X ?_2 & ... & X^(n-1) ?_n`` over Type-0 placeholders and a sample
over propositions ``p``/``q``: one positive word carrying ``{p,q}`` on its
first ``n`` positions, and one negative word per clause marking positive
literals with ``{p}``, negative ones with ``{q}``, and absent variables with
``{p,q}``.  All words end in the empty symbol repeated forever.  Choosing
``q`` for a placeholder corresponds to assigning its variable true.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    AND,
    HOLE0,
    NEXT,
    DagBuilder,
    Sample,
    Substitution,
    SyntaxDag,
    arity,
)
from .textio import CnfInput
from .words import LassoWord

TRUE_PROP = "q"
FALSE_PROP = "p"


@dataclass(frozen=True)
class ReductionInstance:
    sketch: SyntaxDag
    sample: Sample
    variable_holes: tuple[str, ...]  # hole id of ?_i at index i-1
    trivially_unsat: bool


def _hole_name(i: int) -> str:
    return f"v{i}"


def reduce_cnf(cnf: CnfInput) -> ReductionInstance:
    """Build the sketch/sample instance for a CNF formula.

    Empty clauses cannot be represented (their word would equal the positive
    word), so they are dropped and the instance is flagged as trivially
    unsatisfiable instead.  Tautological clauses hold under every assignment
    and cannot be expressed in the marking scheme either; they are dropped
    silently.
    """
    n = cnf.num_vars
    if n < 1:
        raise ValueError("reduction needs at least one CNF variable")
    b = DagBuilder()
    holes = tuple(_hole_name(i) for i in range(1, n + 1))
    conjuncts = []
    for i, hole in enumerate(holes):
        term = b.add(HOLE0, hole=hole)
        for _ in range(i):
            term = b.add(NEXT, term)
        conjuncts.append(term)
    root = conjuncts[-1]
    for term in reversed(conjuncts[:-1]):
        root = b.add(AND, term, root)
    sketch = b.finish(root)

    both = frozenset((FALSE_PROP, TRUE_PROP))
    empty = frozenset()
    positive = LassoWord((both,) * n, (empty,))
    negatives = []
    trivially_unsat = False
    for clause in cnf.clauses:
        if not clause:
            trivially_unsat = True
            continue
        if any(-lit in clause for lit in clause):
            continue
        row = []
        for j in range(1, n + 1):
            if j in clause:
                row.append(frozenset((FALSE_PROP,)))
            elif -j in clause:
                row.append(frozenset((TRUE_PROP,)))
            else:
                row.append(both)
        negatives.append(LassoWord(tuple(row), (empty,)))
    sample = Sample((FALSE_PROP, TRUE_PROP), (positive,), tuple(negatives))
    return ReductionInstance(sketch, sample, holes, trivially_unsat)


def extract_assignment(s: Substitution, inst: ReductionInstance) -> dict[int, bool]:
    """Read a CNF assignment off a restricted substitution and verify it."""
    assignment: dict[int, bool] = {}
    for i, hole in enumerate(inst.variable_holes, start=1):
        image = s[hole]
        if isinstance(image, SyntaxDag):
            if len(image) != 1 or arity(image.nodes[0].label) != 0:
                raise ValueError(f"substitution for {hole} is not a proposition")
            image = image.nodes[0].label
        if image == TRUE_PROP:
            assignment[i] = True
        elif image == FALSE_PROP:
            assignment[i] = False
        else:
            raise ValueError(
                f"substitution for {hole} must be {FALSE_PROP!r} or {TRUE_PROP!r},"
                f" got {image!r}"
            )
    return assignment


def assignment_satisfies(cnf: CnfInput, assignment: dict[int, bool]) -> bool:
    return all(
        any(assignment[abs(lit)] == (lit > 0) for lit in clause)
        for clause in cnf.clauses
    )
