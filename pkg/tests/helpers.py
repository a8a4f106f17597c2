"""Shared oracles and generators for the test suite.

The naive evaluator here unrolls the infinite word far enough to decide any
operator directly from the textbook semantics, without the suffix-index
bookkeeping the library uses.  It is deliberately slow and simple.
"""

from __future__ import annotations

import random

from ltlsketch.formulas import (
    ALWAYS,
    AND,
    BINARY_OPS,
    EVENTUALLY,
    FALSE,
    NEXT,
    NOT,
    OR,
    TRUE,
    UNARY_OPS,
    UNTIL,
    DagBuilder,
    SyntaxDag,
    arity,
)
from ltlsketch.words import LassoWord, symbol_at


def naive_evaluate(f: SyntaxDag, w: LassoWord, t: int = 0) -> bool:
    """Reference semantics by explicit unrolling.

    Witness positions for until/eventually/globally repeat within one period
    once past the prefix, so scanning ``2 * span + 1`` positions from any
    start decides them exactly.
    """
    horizon = 2 * w.span + 1

    def val(i: int, pos: int) -> bool:
        n = f.nodes[i]
        lab = n.label
        if lab == TRUE:
            return True
        if lab == FALSE:
            return False
        if arity(lab) == 0:
            return lab in symbol_at(w, pos)
        if lab == NOT:
            return not val(n.left, pos)
        if lab == NEXT:
            return val(n.left, pos + 1)
        if lab == EVENTUALLY:
            return any(val(n.left, pos + k) for k in range(horizon))
        if lab == ALWAYS:
            return all(val(n.left, pos + k) for k in range(horizon))
        if lab == OR:
            return val(n.left, pos) or val(n.right, pos)
        if lab == AND:
            return val(n.left, pos) and val(n.right, pos)
        if lab == UNTIL:
            for k in range(horizon):
                if val(n.right, pos + k):
                    return True
                if not val(n.left, pos + k):
                    return False
            return False
        raise AssertionError(lab)

    return val(0, t)


def random_word(rng: random.Random, props, max_u=4, max_v=3) -> LassoWord:
    u_len = rng.randint(0, max_u)
    v_len = rng.randint(1, max_v)
    draw = lambda: frozenset(p for p in props if rng.random() < 0.5)
    return LassoWord(
        tuple(draw() for _ in range(u_len)),
        tuple(draw() for _ in range(v_len)),
    )


def random_formula(rng: random.Random, props, max_nodes=7,
                   allow_constants=False) -> SyntaxDag:
    """Random concrete formula whose syntax tree has at most max_nodes."""
    b = DagBuilder()

    def gen(budget: int) -> tuple[int, int]:
        choices = ["leaf"]
        if budget >= 2:
            choices.append("unary")
        if budget >= 3:
            choices.append("binary")
        kind = rng.choice(choices)
        if kind == "leaf":
            pool = list(props) + (["true", "false"] if allow_constants else [])
            return b.add(rng.choice(pool)), 1
        if kind == "unary":
            child, used = gen(budget - 1)
            return b.add(rng.choice(UNARY_OPS), child), used + 1
        left_budget = rng.randint(1, budget - 2)
        left, used_l = gen(left_budget)
        right, used_r = gen(budget - 1 - used_l)
        return b.add(rng.choice(BINARY_OPS), left, right), used_l + used_r + 1

    root, _ = gen(max_nodes)
    return b.finish(root)


def enumerate_trees(props, max_nodes: int):
    """All concrete formulas with syntax trees of at most max_nodes."""
    by_size: dict[int, list] = {1: [(p,) for p in props]}
    for size in range(2, max_nodes + 1):
        items = []
        for op in UNARY_OPS:
            for sub in by_size[size - 1]:
                items.append((op, sub))
        for op in BINARY_OPS:
            for lsize in range(1, size - 1):
                rsize = size - 1 - lsize
                for left in by_size[lsize]:
                    for right in by_size[rsize]:
                        items.append((op, left, right))
        by_size[size] = items
    for size in range(1, max_nodes + 1):
        for tree in by_size[size]:
            yield tree_to_dag(tree)


def tree_to_dag(tree) -> SyntaxDag:
    b = DagBuilder()

    def build(t) -> int:
        if len(t) == 1:
            return b.add(t[0])
        if len(t) == 2:
            return b.add(t[0], build(t[1]))
        return b.add(t[0], build(t[1]), build(t[2]))

    return b.finish(build(tree))
