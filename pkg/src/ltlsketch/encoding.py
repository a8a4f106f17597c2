"""Propositional encodings of sketch completion, and their model decoders.

Two encodings are built here.  The *existence* encoding is satisfiable iff
some complete substitution makes the sketch consistent with the sample; it
guesses satisfaction-table rows for every sketch node and constrains them by
the operator recurrences, the root verdicts, and agreement on equal
suffixes.  The *sized* encoding additionally synthesizes the missing
subformulas from a pool of at most ``n`` DAG nodes, so its models can be
decoded into concrete completions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import prop as P
from .formulas import (
    ALWAYS,
    AND,
    BINARY_OPS,
    EVENTUALLY,
    FALSE,
    HOLE0,
    HOLE1,
    HOLE2,
    NEXT,
    NOT,
    OR,
    TRUE,
    UNARY_OPS,
    UNTIL,
    DagBuilder,
    Sample,
    SyntaxDag,
    arity,
    check_consistency,
    is_hole,
    suffix_classes,
    _between,
    _future,
    _next_pos,
)
from .words import LassoWord, symbol_at


class EncodingError(RuntimeError):
    """A decoded model contradicts an invariant the encoding guarantees."""


@dataclass
class EncodingStats:
    variables: int
    clauses: int | None
    n: int | None
    y_vars: int = 0
    x_vars: int = 0
    l_vars: int = 0
    r_vars: int = 0
    row_vars: int = 0


@dataclass
class VarCatalog:
    """All catalog variables of one encoding instance.

    ``y[(w, i, t)]`` carries the table entry of node ``i`` at position ``t``
    of word ``w``; ``x[(i, label)]`` the label choice of a placeholder or
    synthesized node; ``l``/``r`` the child selectors of synthesized
    structure; ``yl``/``yr`` the value rows of the selected children.
    """

    sketch: SyntaxDag
    sample: Sample
    n: int | None
    restricted: bool
    pool: P.VarPool = field(default_factory=P.VarPool)
    y: dict[tuple[int, int, int], int] = field(default_factory=dict)
    x: dict[tuple[int, str], int] = field(default_factory=dict)
    l: dict[tuple[int, int], int] = field(default_factory=dict)
    r: dict[tuple[int, int], int] = field(default_factory=dict)
    yl: dict[tuple[int, int, int], int] = field(default_factory=dict)
    yr: dict[tuple[int, int, int], int] = field(default_factory=dict)

    @property
    def words(self) -> tuple[LassoWord, ...]:
        return self.sample.words

    def y_row(self, w: int, i: int) -> list[P.PropFormula]:
        span = self.words[w].span
        return [P.pvar(self.y[w, i, t]) for t in range(span)]


def encoding_stats(cat: VarCatalog, clause_count: int | None = None) -> EncodingStats:
    return EncodingStats(
        variables=cat.pool.count,
        clauses=clause_count,
        n=cat.n,
        y_vars=len(cat.y),
        x_vars=len(cat.x),
        l_vars=len(cat.l),
        r_vars=len(cat.r),
        row_vars=len(cat.yl) + len(cat.yr),
    )


# ---------------------------------------------------------------------------
# Operator recurrences as constraints


def _label_rows(label: str, w: LassoWord, yrow, lrow, rrow) -> list[P.PropFormula]:
    """Per-position constraints forcing ``yrow`` to be the satisfaction row
    of an operator applied to the child rows (the table recurrences)."""
    u_len, span = len(w.u), w.span
    if label == TRUE:
        return [y for y in yrow]
    if label == FALSE:
        return [P.pnot(y) for y in yrow]
    if arity(label) == 0 and not is_hole(label):
        return [
            y if label in symbol_at(w, t) else P.pnot(y)
            for t, y in enumerate(yrow)
        ]
    if label == NOT:
        return [P.piff(y, P.pnot(lrow[t])) for t, y in enumerate(yrow)]
    if label == NEXT:
        return [
            P.piff(y, lrow[_next_pos(t, u_len, span)]) for t, y in enumerate(yrow)
        ]
    if label == OR:
        return [P.piff(y, P.por(lrow[t], rrow[t])) for t, y in enumerate(yrow)]
    if label == AND:
        return [P.piff(y, P.pand(lrow[t], rrow[t])) for t, y in enumerate(yrow)]
    if label == EVENTUALLY:
        return [
            P.piff(y, P.por(*[lrow[s] for s in _future(t, u_len, span)]))
            for t, y in enumerate(yrow)
        ]
    if label == ALWAYS:
        return [
            P.piff(y, P.pand(*[lrow[s] for s in _future(t, u_len, span)]))
            for t, y in enumerate(yrow)
        ]
    if label == UNTIL:
        out = []
        for t, y in enumerate(yrow):
            witnesses = [
                P.pand(rrow[t2], *[lrow[s] for s in _between(t, t2, u_len, span)])
                for t2 in _future(t, u_len, span)
            ]
            out.append(P.piff(y, P.por(*witnesses)))
        return out
    raise AssertionError(f"no recurrence for label {label!r}")


def _validate(sk: SyntaxDag, sample: Sample) -> None:
    if not sample.props:
        raise ValueError("sample has an empty proposition universe")
    if not sample.words:
        raise ValueError("sample must contain at least one word")
    extra = sk.propositions() - set(sample.props)
    if extra:
        raise ValueError(f"sketch uses propositions {sorted(extra)} not in the sample")


def _placeholder_blocks(sk: SyntaxDag, cat: VarCatalog, out: list[P.PropFormula]) -> None:
    """Unique-operator choices for Type-1/2 nodes, plus equal choices for
    nodes that share one named placeholder."""
    first_node: dict[str, int] = {}
    for i, node in enumerate(sk.nodes):
        if node.label not in (HOLE1, HOLE2):
            continue
        options = UNARY_OPS if node.label == HOLE1 else BINARY_OPS
        for lab in options:
            cat.x[i, lab] = cat.pool.fresh()
        out.append(P.exactly_one(P.pvar(cat.x[i, lab]) for lab in options))
        anchor = first_node.setdefault(node.hole, i)
        if anchor != i:
            for lab in options:
                out.append(P.piff(P.pvar(cat.x[i, lab]), P.pvar(cat.x[anchor, lab])))


# ---------------------------------------------------------------------------
# Existence encoding


def encode_existence(
    sk: SyntaxDag, sample: Sample, restricted: bool = False
) -> tuple[P.PropFormula, VarCatalog]:
    """Constraint satisfiable iff a (restricted) completion consistent with
    the sample exists."""
    _validate(sk, sample)
    cat = VarCatalog(sk, sample, None, restricted)
    words = sample.words
    for w, word in enumerate(words):
        for i in range(len(sk)):
            for t in range(word.span):
                cat.y[w, i, t] = cat.pool.fresh()
    constraints: list[P.PropFormula] = []
    _placeholder_blocks(sk, cat, constraints)
    if restricted:
        for i, node in enumerate(sk.nodes):
            if node.label == HOLE0:
                for p in sample.props:
                    cat.x[i, p] = cat.pool.fresh()
                constraints.append(
                    P.exactly_one(P.pvar(cat.x[i, p]) for p in sample.props)
                )

    for w, word in enumerate(words):
        for i, node in enumerate(sk.nodes):
            yrow = cat.y_row(w, i)
            lrow = cat.y_row(w, node.left) if node.left is not None else None
            rrow = cat.y_row(w, node.right) if node.right is not None else None
            if node.label == HOLE0:
                if restricted:
                    for p in sample.props:
                        constraints.append(
                            P.pimplies(
                                P.pvar(cat.x[i, p]),
                                P.pand(*_label_rows(p, word, yrow, None, None)),
                            )
                        )
                continue
            if node.label == HOLE1:
                for lab in UNARY_OPS:
                    constraints.append(
                        P.pimplies(
                            P.pvar(cat.x[i, lab]),
                            P.pand(*_label_rows(lab, word, yrow, lrow, rrow)),
                        )
                    )
            elif node.label == HOLE2:
                for lab in BINARY_OPS:
                    constraints.append(
                        P.pimplies(
                            P.pvar(cat.x[i, lab]),
                            P.pand(*_label_rows(lab, word, yrow, lrow, rrow)),
                        )
                    )
            else:
                constraints.extend(_label_rows(node.label, word, yrow, lrow, rrow))

    for w in range(len(sample.positives)):
        constraints.append(P.pvar(cat.y[w, 0, 0]))
    for w in range(len(sample.positives), len(words)):
        constraints.append(P.pnot(P.pvar(cat.y[w, 0, 0])))

    hole_nodes = [i for i, n in enumerate(sk.nodes) if n.label == HOLE0]
    if hole_nodes:
        for _, members in suffix_classes(sample):
            for (w1, t1), (w2, t2) in itertools.combinations(members, 2):
                for i in hole_nodes:
                    constraints.append(
                        P.piff(P.pvar(cat.y[w1, i, t1]), P.pvar(cat.y[w2, i, t2]))
                    )

    return P.pand(*constraints), cat


@dataclass(frozen=True)
class ExistenceDecoding:
    """Operator choices and, per Type-0 placeholder, the suffix labeling."""

    operators: dict[str, str]
    labelings: dict[str, dict[LassoWord, bool]]
    chosen_props: dict[str, str]


def decode_existence_model(
    model: dict[int, bool], cat: VarCatalog, sk: SyntaxDag, sample: Sample
) -> ExistenceDecoding:
    operators: dict[str, str] = {}
    for i, node in enumerate(sk.nodes):
        if node.label in (HOLE1, HOLE2):
            options = UNARY_OPS if node.label == HOLE1 else BINARY_OPS
            chosen = [lab for lab in options if model[cat.x[i, lab]]]
            if len(chosen) != 1:
                raise EncodingError(f"node {i}: {len(chosen)} operators selected")
            if operators.setdefault(node.hole, chosen[0]) != chosen[0]:
                raise EncodingError(f"placeholder {node.hole}: conflicting operators")
    labelings: dict[str, dict[LassoWord, bool]] = {}
    chosen_props: dict[str, str] = {}
    classes = suffix_classes(sample)
    for i, node in enumerate(sk.nodes):
        if node.label != HOLE0:
            continue
        labeling: dict[LassoWord, bool] = {}
        for canon, members in classes:
            bits = {model[cat.y[w, i, t]] for w, t in members}
            if len(bits) != 1:
                raise EncodingError(
                    f"placeholder {node.hole}: equal suffixes labeled differently"
                )
            labeling[canon] = bits.pop()
        labelings[node.hole] = labeling
        if cat.restricted:
            props = [p for p in sample.props if model[cat.x[i, p]]]
            if len(props) != 1:
                raise EncodingError(f"node {i}: {len(props)} propositions selected")
            chosen_props[node.hole] = props[0]
    return ExistenceDecoding(operators, labelings, chosen_props)


# ---------------------------------------------------------------------------
# Sized encoding


def _child_pool(i: int, sk_size: int, n: int) -> range:
    """Candidate children of a structure node: synthesized nodes only, and
    strictly below the node itself (keeps the DAG acyclic)."""
    return range(sk_size, n) if i < sk_size else range(i + 1, n)


def _structure_labels(sample: Sample, pool_empty: bool) -> tuple[str, ...]:
    if pool_empty:
        return sample.props
    return sample.props + UNARY_OPS + BINARY_OPS


def encode_sized(
    sk: SyntaxDag, sample: Sample, n: int
) -> tuple[P.PropFormula, VarCatalog]:
    """Constraint satisfiable iff the sketch completes into a consistent
    formula whose syntax DAG fits in ``n`` nodes (sketch nodes included)."""
    _validate(sk, sample)
    if n < len(sk):
        raise ValueError(f"size bound {n} below sketch size {len(sk)}")
    cat = VarCatalog(sk, sample, n, False)
    words = sample.words
    for w, word in enumerate(words):
        for i in range(n):
            for t in range(word.span):
                cat.y[w, i, t] = cat.pool.fresh()

    structure = [i for i, node in enumerate(sk.nodes) if node.label == HOLE0]
    structure += list(range(len(sk), n))
    constraints: list[P.PropFormula] = []
    _placeholder_blocks(sk, cat, constraints)

    for i in structure:
        pool = _child_pool(i, len(sk), n)
        labels = _structure_labels(sample, not pool)
        for lab in labels:
            cat.x[i, lab] = cat.pool.fresh()
        constraints.append(P.exactly_one(P.pvar(cat.x[i, lab]) for lab in labels))
        if not pool:
            continue
        for j in pool:
            cat.l[i, j] = cat.pool.fresh()
            cat.r[i, j] = cat.pool.fresh()
        constraints.append(P.exactly_one(P.pvar(cat.l[i, j]) for j in pool))
        rvars = [P.pvar(cat.r[i, j]) for j in pool]
        constraints.extend(
            P.por(P.pnot(a), P.pnot(b))
            for k, a in enumerate(rvars)
            for b in rvars[k + 1:]
        )
        constraints.append(
            P.pimplies(
                P.por(*[P.pvar(cat.x[i, lab]) for lab in BINARY_OPS]),
                P.por(*rvars),
            )
        )
        for w, word in enumerate(words):
            for t in range(word.span):
                cat.yl[w, i, t] = cat.pool.fresh()
                cat.yr[w, i, t] = cat.pool.fresh()
        for j in pool:
            link_l = []
            link_r = []
            for w, word in enumerate(words):
                for t in range(word.span):
                    link_l.append(
                        P.piff(P.pvar(cat.yl[w, i, t]), P.pvar(cat.y[w, j, t]))
                    )
                    link_r.append(
                        P.piff(P.pvar(cat.yr[w, i, t]), P.pvar(cat.y[w, j, t]))
                    )
            constraints.append(P.pimplies(P.pvar(cat.l[i, j]), P.pand(*link_l)))
            constraints.append(P.pimplies(P.pvar(cat.r[i, j]), P.pand(*link_r)))

    structure_set = set(structure)
    for w, word in enumerate(words):
        for i in range(n):
            yrow = cat.y_row(w, i)
            if i in structure_set:
                pool = _child_pool(i, len(sk), n)
                labels = _structure_labels(sample, not pool)
                if pool:
                    lrow = [P.pvar(cat.yl[w, i, t]) for t in range(word.span)]
                    rrow = [P.pvar(cat.yr[w, i, t]) for t in range(word.span)]
                else:
                    lrow = rrow = None
                for lab in labels:
                    constraints.append(
                        P.pimplies(
                            P.pvar(cat.x[i, lab]),
                            P.pand(*_label_rows(lab, word, yrow, lrow, rrow)),
                        )
                    )
                continue
            node = sk.nodes[i]
            lrow = cat.y_row(w, node.left) if node.left is not None else None
            rrow = cat.y_row(w, node.right) if node.right is not None else None
            if node.label == HOLE1:
                for lab in UNARY_OPS:
                    constraints.append(
                        P.pimplies(
                            P.pvar(cat.x[i, lab]),
                            P.pand(*_label_rows(lab, word, yrow, lrow, rrow)),
                        )
                    )
            elif node.label == HOLE2:
                for lab in BINARY_OPS:
                    constraints.append(
                        P.pimplies(
                            P.pvar(cat.x[i, lab]),
                            P.pand(*_label_rows(lab, word, yrow, lrow, rrow)),
                        )
                    )
            else:
                constraints.extend(
                    _label_rows(node.label, word, yrow, lrow, rrow)
                )

    for w in range(len(sample.positives)):
        constraints.append(P.pvar(cat.y[w, 0, 0]))
    for w in range(len(sample.positives), len(words)):
        constraints.append(P.pnot(P.pvar(cat.y[w, 0, 0])))

    return P.pand(*constraints), cat


def decode_sized_model(
    model: dict[int, bool], cat: VarCatalog, sk: SyntaxDag, n: int
) -> SyntaxDag:
    """Rebuild the completed formula a sized-encoding model describes.

    The result is re-verified against the sample before being returned.
    """
    sample = cat.sample

    def chosen_label(i: int) -> str:
        pool = _child_pool(i, len(sk), n)
        labels = _structure_labels(sample, not pool)
        chosen = [lab for lab in labels if model[cat.x[i, lab]]]
        if len(chosen) != 1:
            raise EncodingError(f"node {i}: {len(chosen)} labels selected")
        return chosen[0]

    def chosen_child(i: int, sel: dict[tuple[int, int], int]) -> int:
        pool = _child_pool(i, len(sk), n)
        chosen = [j for j in pool if model[sel[i, j]]]
        if len(chosen) != 1:
            raise EncodingError(f"node {i}: {len(chosen)} children selected")
        return chosen[0]

    b = DagBuilder()
    memo: dict[int, int] = {}

    def rebuild(i: int) -> int:
        if i in memo:
            return memo[i]
        if i < len(sk) and sk.nodes[i].label not in (HOLE0,):
            node = sk.nodes[i]
            if node.label in (HOLE1, HOLE2):
                options = UNARY_OPS if node.label == HOLE1 else BINARY_OPS
                chosen = [lab for lab in options if model[cat.x[i, lab]]]
                if len(chosen) != 1:
                    raise EncodingError(f"node {i}: {len(chosen)} operators selected")
                label = chosen[0]
            else:
                label = node.label
            kids = [rebuild(k) for k in (node.left, node.right) if k is not None]
            out = b.add(label, *kids)
        else:
            label = chosen_label(i)
            if arity(label) == 0:
                out = b.add(label)
            elif arity(label) == 1:
                out = b.add(label, rebuild(chosen_child(i, cat.l)))
            else:
                out = b.add(
                    label,
                    rebuild(chosen_child(i, cat.l)),
                    rebuild(chosen_child(i, cat.r)),
                )
        memo[i] = out
        return out

    result = b.finish(rebuild(0))
    report = check_consistency(result, sample)
    if not report.ok:
        raise EncodingError(
            "decoded completion is not consistent with the sample; "
            "the encoding and the semantics disagree"
        )
    return result
