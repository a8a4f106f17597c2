"""LTL formulas and sketches as syntax DAGs, and their lasso-word semantics.

A formula is a directed acyclic graph of labeled nodes with structurally
identical subterms merged, so the node count is the number of distinct
subformulas.  Sketches are the same DAGs extended with placeholder labels:
``?0`` stands for a missing subformula, ``?1`` for a missing unary operator
and ``?2`` for a missing binary operator.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .words import LassoWord, canonicalize, suffix, symbol_at

NOT, NEXT, EVENTUALLY, ALWAYS = "!", "X", "F", "G"
OR, AND, UNTIL = "|", "&", "U"
TRUE, FALSE = "true", "false"
HOLE0, HOLE1, HOLE2 = "?0", "?1", "?2"

UNARY_OPS = (NOT, NEXT, EVENTUALLY, ALWAYS)
BINARY_OPS = (OR, AND, UNTIL)
CONSTANTS = (TRUE, FALSE)
HOLE_LABELS = (HOLE0, HOLE1, HOLE2)
RESERVED_WORDS = frozenset(CONSTANTS) | {NEXT, EVENTUALLY, ALWAYS, UNTIL}


def arity(label: str) -> int:
    if label in BINARY_OPS or label == HOLE2:
        return 2
    if label in UNARY_OPS or label == HOLE1:
        return 1
    return 0


def is_hole(label: str) -> bool:
    return label in HOLE_LABELS


@dataclass(frozen=True)
class Node:
    """One syntax-DAG node.  ``hole`` is the placeholder identity, if any."""

    label: str
    left: int | None = None
    right: int | None = None
    hole: str | None = None


class SyntaxDag:
    """Canonical DAG of a formula or sketch.

    Nodes are stored root-first; every child index is strictly greater than
    each of its parents' indices, and structurally identical subterms are
    merged (distinct anonymous placeholders never merge).
    """

    __slots__ = ("nodes",)

    def __init__(self, nodes: tuple[Node, ...]):
        self.nodes = nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def __eq__(self, other) -> bool:
        return isinstance(other, SyntaxDag) and self.nodes == other.nodes

    def __hash__(self) -> int:
        return hash(self.nodes)

    def __repr__(self) -> str:
        return f"SyntaxDag({len(self.nodes)} nodes)"

    def node(self, i: int) -> Node:
        return self.nodes[i]

    def propositions(self) -> frozenset:
        return frozenset(
            n.label for n in self.nodes
            if arity(n.label) == 0 and not is_hole(n.label) and n.label not in CONSTANTS
        )

    def holes(self, kind: str | None = None) -> tuple[str, ...]:
        """Placeholder identities, optionally filtered by ?0/?1/?2."""
        seen: dict[str, None] = {}
        for n in self.nodes:
            if is_hole(n.label) and (kind is None or n.label == kind):
                seen.setdefault(n.hole, None)
        return tuple(seen)

    @property
    def is_concrete(self) -> bool:
        return not any(is_hole(n.label) for n in self.nodes)

    def hole_kind(self, hole: str) -> str:
        for n in self.nodes:
            if n.hole == hole:
                return n.label
        raise KeyError(hole)

    def subdag(self, i: int) -> "SyntaxDag":
        """The sub-DAG rooted at node ``i`` as a standalone formula."""
        b = DagBuilder()

        def rec(j: int, memo: dict[int, int]) -> int:
            if j in memo:
                return memo[j]
            n = self.nodes[j]
            kids = [rec(k, memo) for k in (n.left, n.right) if k is not None]
            memo[j] = b.add(n.label, *kids, hole=n.hole)
            return memo[j]

        return b.finish(rec(i, {}))


class DagBuilder:
    """Hash-consing builder producing canonical SyntaxDags.

    Interning merges structurally equal subterms.  Placeholders are interned
    by their identity, so equally named placeholders share one node (for ?0)
    while anonymous ones stay distinct.
    """

    def __init__(self):
        self._nodes: list[Node] = []
        self._intern: dict[tuple, int] = {}
        self._fresh = itertools.count()

    def add(self, label: str, *children: int, hole: str | None = None) -> int:
        if is_hole(label) and hole is None:
            hole = f"{label}#{next(self._fresh)}"
        if not is_hole(label) and hole is not None:
            raise ValueError(f"operator {label!r} cannot carry a placeholder id")
        if len(children) != arity(label):
            raise ValueError(
                f"label {label!r} takes {arity(label)} children, got {len(children)}"
            )
        left = children[0] if children else None
        right = children[1] if len(children) > 1 else None
        key = (label, hole, left, right)
        if key not in self._intern:
            self._intern[key] = len(self._nodes)
            self._nodes.append(Node(label, left, right, hole))
        return self._intern[key]

    def leaf(self, label: str) -> int:
        return self.add(label)

    def hole(self, kind: str, name: str | None = None) -> int:
        if kind == HOLE0:
            return self.add(kind, hole=name)
        raise ValueError("use add() for placeholder operators with children")

    def insert(self, dag: SyntaxDag, memo: dict[int, int] | None = None) -> int:
        """Copy another DAG into this builder, returning its new root index."""
        memo = {} if memo is None else memo

        def rec(j: int) -> int:
            if j in memo:
                return memo[j]
            n = dag.nodes[j]
            kids = [rec(k) for k in (n.left, n.right) if k is not None]
            memo[j] = self.add(n.label, *kids, hole=n.hole)
            return memo[j]

        return rec(0)

    def finish(self, root: int) -> SyntaxDag:
        """Renumber reachable nodes so the root is 0 and parents precede
        children (every reference to a node is emitted before the node).

        A plain breadth-first numbering can place a shared subterm before one
        of its parents (e.g. in ``a | X a``), so a Kahn-style topological
        sweep with a FIFO queue is used instead.
        """
        refs: dict[int, int] = {root: 0}
        stack = [root]
        while stack:
            j = stack.pop()
            n = self._nodes[j]
            for k in (n.left, n.right):
                if k is None:
                    continue
                if k not in refs:
                    refs[k] = 0
                    stack.append(k)
                refs[k] += 1
        new_id: dict[int, int] = {}
        queue = deque([root])
        while queue:
            j = queue.popleft()
            new_id[j] = len(new_id)
            n = self._nodes[j]
            for k in (n.left, n.right):
                if k is None:
                    continue
                refs[k] -= 1
                if refs[k] == 0:
                    queue.append(k)
        out = [None] * len(new_id)
        for j, i in new_id.items():
            n = self._nodes[j]
            out[i] = Node(
                n.label,
                new_id[n.left] if n.left is not None else None,
                new_id[n.right] if n.right is not None else None,
                n.hole,
            )
        return SyntaxDag(tuple(out))


def dag_size(f: SyntaxDag) -> int:
    """Number of distinct subformulas; placeholders count as nodes."""
    return len(f.nodes)


def dag_equal(a: SyntaxDag, b: SyntaxDag) -> bool:
    """Structural equality up to a renaming bijection of placeholder ids."""
    if len(a) != len(b):
        return False
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}
    for na, nb in zip(a.nodes, b.nodes):
        if (na.label, na.left, na.right) != (nb.label, nb.left, nb.right):
            return False
        if (na.hole is None) != (nb.hole is None):
            return False
        if na.hole is not None:
            if fwd.setdefault(na.hole, nb.hole) != nb.hole:
                return False
            if bwd.setdefault(nb.hole, na.hole) != na.hole:
                return False
    return True


# ---------------------------------------------------------------------------
# Samples


@dataclass(frozen=True)
class Sample:
    """Disjoint positive/negative lasso words over an ordered universe."""

    props: tuple[str, ...]
    positives: tuple[LassoWord, ...]
    negatives: tuple[LassoWord, ...]

    def __post_init__(self):
        object.__setattr__(self, "props", tuple(self.props))
        object.__setattr__(self, "positives", tuple(self.positives))
        object.__setattr__(self, "negatives", tuple(self.negatives))
        universe = set(self.props)
        if len(self.props) != len(universe):
            raise ValueError("duplicate proposition in universe")
        for w in self.positives + self.negatives:
            extra = w.propositions() - universe
            if extra:
                raise ValueError(f"word {w!r} uses undeclared propositions {sorted(extra)}")
        pos_canon = {canonicalize(w): i for i, w in enumerate(self.positives)}
        for j, w in enumerate(self.negatives):
            c = canonicalize(w)
            if c in pos_canon:
                raise ValueError(
                    f"positive word {pos_canon[c]} and negative word {j} denote "
                    f"the same infinite word {w!r}"
                )

    @property
    def words(self) -> tuple[LassoWord, ...]:
        return self.positives + self.negatives

    @property
    def size(self) -> int:
        return sum(w.span for w in self.words)


def suffix_classes(sample: Sample) -> list[tuple[LassoWord, list[tuple[int, int]]]]:
    """Group the (word index, position) pairs of suf(S) by equal suffix.

    Returns one (canonical suffix, members) entry per distinct infinite
    suffix, in first-occurrence order.
    """
    groups: dict[LassoWord, list[tuple[int, int]]] = {}
    for wi, w in enumerate(sample.words):
        for t in range(w.span):
            groups.setdefault(canonicalize(suffix(w, t)), []).append((wi, t))
    return list(groups.items())


# ---------------------------------------------------------------------------
# Semantics

def _next_pos(t: int, u_len: int, span: int) -> int:
    return t + 1 if t < span - 1 else u_len


def _future(t: int, u_len: int, span: int) -> range:
    """Positions a witness may occupy when starting from position t."""
    return range(t, span) if t < u_len else range(u_len, span)


def _between(t: int, t2: int, u_len: int, span: int):
    """Positions strictly before a witness at t2, walking from t.

    In the periodic part the walk may wrap; a witness at the start position
    itself needs nothing before it.
    """
    if t < u_len or t <= t2:
        return range(t, t2)
    return itertools.chain(range(u_len, t2), range(t, span))


def evaluate(f: SyntaxDag, w: LassoWord, universe=None) -> bool:
    """Valuation of a placeholder-free formula on an infinite word.

    Memoized recursion over (node, suffix position); the finitely many
    distinct suffixes of a lasso word close the recursion.
    """
    if not f.is_concrete:
        raise ValueError("cannot evaluate a sketch with placeholders")
    if universe is not None:
        extra = f.propositions() - frozenset(universe)
        if extra:
            raise ValueError(f"formula uses undeclared propositions {sorted(extra)}")
    u_len, span = len(w.u), w.span
    memo: dict[tuple[int, int], bool] = {}

    def walk(t: int):
        """Each distinct suffix position once, in visiting order from t."""
        yield from range(t, span)
        if t > u_len:
            yield from range(u_len, t)

    def val(i: int, t: int) -> bool:
        key = (i, t)
        if key in memo:
            return memo[key]
        n = f.nodes[i]
        lab = n.label
        if lab == TRUE:
            r = True
        elif lab == FALSE:
            r = False
        elif arity(lab) == 0:
            r = lab in symbol_at(w, t)
        elif lab == NOT:
            r = not val(n.left, t)
        elif lab == NEXT:
            r = val(n.left, _next_pos(t, u_len, span))
        elif lab == EVENTUALLY:
            r = any(val(n.left, s) for s in walk(t))
        elif lab == ALWAYS:
            r = all(val(n.left, s) for s in walk(t))
        elif lab == OR:
            r = val(n.left, t) or val(n.right, t)
        elif lab == AND:
            r = val(n.left, t) and val(n.right, t)
        elif lab == UNTIL:
            r = False
            for s in walk(t):
                if val(n.right, s):
                    r = True
                    break
                if not val(n.left, s):
                    break
        else:  # pragma: no cover
            raise AssertionError(f"unhandled label {lab!r}")
        memo[key] = r
        return r

    return val(0, 0)


@dataclass(frozen=True)
class SatisfactionTable:
    """Truth of every subformula on every distinct suffix of one word."""

    word: LassoWord
    rows: tuple[tuple[int, ...], ...]

    def row(self, i: int) -> tuple[int, ...]:
        return self.rows[i]

    def bits(self, i: int) -> str:
        return "".join(str(b) for b in self.rows[i])


def build_table(f: SyntaxDag, w: LassoWord) -> SatisfactionTable:
    """Bottom-up satisfaction table via the per-operator recurrences.

    This is the table construction the propositional encodings mirror; it is
    deliberately a separate code path from :func:`evaluate`.
    """
    if not f.is_concrete:
        raise ValueError("cannot tabulate a sketch with placeholders")
    u_len, span = len(w.u), w.span
    rows: list[tuple[int, ...] | None] = [None] * len(f.nodes)
    for i in range(len(f.nodes) - 1, -1, -1):
        n = f.nodes[i]
        lab = n.label
        if lab == TRUE:
            row = (1,) * span
        elif lab == FALSE:
            row = (0,) * span
        elif arity(lab) == 0:
            row = tuple(int(lab in symbol_at(w, t)) for t in range(span))
        elif lab == NOT:
            row = tuple(1 - b for b in rows[n.left])
        elif lab == NEXT:
            lrow = rows[n.left]
            row = tuple(lrow[_next_pos(t, u_len, span)] for t in range(span))
        elif lab == OR:
            row = tuple(max(a, b) for a, b in zip(rows[n.left], rows[n.right]))
        elif lab == AND:
            row = tuple(min(a, b) for a, b in zip(rows[n.left], rows[n.right]))
        elif lab == EVENTUALLY:
            lrow = rows[n.left]
            row = tuple(
                max(lrow[s] for s in _future(t, u_len, span)) for t in range(span)
            )
        elif lab == ALWAYS:
            lrow = rows[n.left]
            row = tuple(
                min(lrow[s] for s in _future(t, u_len, span)) for t in range(span)
            )
        elif lab == UNTIL:
            lrow, rrow = rows[n.left], rows[n.right]
            row = tuple(
                max(
                    (
                        min([rrow[t2]] + [lrow[s] for s in _between(t, t2, u_len, span)])
                        for t2 in _future(t, u_len, span)
                    ),
                )
                for t in range(span)
            )
        else:  # pragma: no cover
            raise AssertionError(f"unhandled label {lab!r}")
        rows[i] = row
    return SatisfactionTable(w, tuple(rows))


# ---------------------------------------------------------------------------
# Substitutions

Substitution = dict


def _check_substitution(sk: SyntaxDag, s: Substitution) -> None:
    for hole in sk.holes():
        if hole not in s:
            raise ValueError(f"substitution is not complete: missing {hole!r}")
        kind = sk.hole_kind(hole)
        image = s[hole]
        if kind == HOLE0 and not isinstance(image, SyntaxDag):
            raise ValueError(f"Type-0 placeholder {hole!r} needs a formula image")
        if kind == HOLE1 and image not in UNARY_OPS:
            raise ValueError(f"Type-1 placeholder {hole!r} needs a unary operator")
        if kind == HOLE2 and image not in BINARY_OPS:
            raise ValueError(f"Type-2 placeholder {hole!r} needs a binary operator")


def apply_substitution(sk: SyntaxDag, s: Substitution) -> SyntaxDag:
    """Replace every placeholder by its image and re-canonicalize."""
    _check_substitution(sk, s)
    b = DagBuilder()
    memo: dict[int, int] = {}
    image_memo: dict[int, int] = {}

    def rec(i: int) -> int:
        if i in memo:
            return memo[i]
        n = sk.nodes[i]
        if n.label == HOLE0:
            out = b.insert(s[n.hole], image_memo)
        else:
            label = s[n.hole] if is_hole(n.label) else n.label
            kids = [rec(k) for k in (n.left, n.right) if k is not None]
            out = b.add(label, *kids, hole=None)
        memo[i] = out
        return out

    return b.finish(rec(0))


def is_restricted(sk: SyntaxDag, s: Substitution) -> bool:
    """Whether every Type-0 image is a single proposition."""
    for hole in sk.holes(HOLE0):
        image = s.get(hole)
        if not (isinstance(image, SyntaxDag) and len(image) == 1
                and arity(image.nodes[0].label) == 0
                and image.nodes[0].label not in CONSTANTS
                and not is_hole(image.nodes[0].label)):
            return False
    return True


# ---------------------------------------------------------------------------
# Consistency


@dataclass(frozen=True)
class ConsistencyReport:
    positives_ok: tuple[bool, ...]
    negatives_ok: tuple[bool, ...]

    @property
    def ok(self) -> bool:
        return all(self.positives_ok) and all(self.negatives_ok)


def check_consistency(f: SyntaxDag, sample: Sample) -> ConsistencyReport:
    """Per-word verdicts: positives must satisfy f, negatives must not."""
    pos = tuple(evaluate(f, w, sample.props) for w in sample.positives)
    neg = tuple(not evaluate(f, w, sample.props) for w in sample.negatives)
    return ConsistencyReport(pos, neg)
