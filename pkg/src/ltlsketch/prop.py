"""Propositional formula construction and Tseitin clausification.

Formulas are immutable trees over integer variable handles.  The smart
constructors fold constants and flatten nested conjunctions/disjunctions, so
callers can assemble constraints without worrying about degenerate shapes.
Clausification introduces auxiliary variables above a watermark; everything
past this module only ever sees the original catalog variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PropFormula:
    __slots__ = ()


class _Const(PropFormula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = value

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


TRUE = _Const(True)
FALSE = _Const(False)


class Var(PropFormula):
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index

    def __repr__(self):
        return f"x{self.index}"


class Not(PropFormula):
    __slots__ = ("arg",)

    def __init__(self, arg: PropFormula):
        self.arg = arg


class And(PropFormula):
    __slots__ = ("args",)

    def __init__(self, args: tuple[PropFormula, ...]):
        self.args = args


class Or(PropFormula):
    __slots__ = ("args",)

    def __init__(self, args: tuple[PropFormula, ...]):
        self.args = args


class Iff(PropFormula):
    __slots__ = ("a", "b")

    def __init__(self, a: PropFormula, b: PropFormula):
        self.a = a
        self.b = b


def pvar(index: int) -> Var:
    if index < 1:
        raise ValueError("variable handles start at 1")
    return Var(index)


def pnot(f: PropFormula) -> PropFormula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def pand(*fs: PropFormula) -> PropFormula:
    flat: list[PropFormula] = []
    for f in fs:
        if f is TRUE:
            continue
        if f is FALSE:
            return FALSE
        if isinstance(f, And):
            flat.extend(f.args)
        else:
            flat.append(f)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def por(*fs: PropFormula) -> PropFormula:
    flat: list[PropFormula] = []
    for f in fs:
        if f is FALSE:
            continue
        if f is TRUE:
            return TRUE
        if isinstance(f, Or):
            flat.extend(f.args)
        else:
            flat.append(f)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def pimplies(a: PropFormula, b: PropFormula) -> PropFormula:
    return por(pnot(a), b)


def piff(a: PropFormula, b: PropFormula) -> PropFormula:
    if a is TRUE:
        return b
    if b is TRUE:
        return a
    if a is FALSE:
        return pnot(b)
    if b is FALSE:
        return pnot(a)
    if a is b:
        return TRUE
    return Iff(a, b)


def exactly_one(fs) -> PropFormula:
    """At-least-one clause plus pairwise at-most-one."""
    fs = list(fs)
    amo = [por(pnot(a), pnot(b)) for i, a in enumerate(fs) for b in fs[i + 1:]]
    return pand(por(*fs), *amo)


class VarPool:
    """Allocator of dense variable handles, starting at 1."""

    def __init__(self):
        self._count = 0

    def fresh(self) -> int:
        self._count += 1
        return self._count

    def fresh_var(self) -> Var:
        return Var(self.fresh())

    @property
    def count(self) -> int:
        return self._count


@dataclass
class Cnf:
    """Clause list with a watermark separating catalog from auxiliary vars."""

    clauses: list[list[int]]
    num_vars: int
    watermark: int

    def __post_init__(self):
        if self.watermark > self.num_vars:
            raise ValueError("watermark beyond variable count")


def eval_prop(f: PropFormula, assignment: dict[int, bool]) -> bool:
    """Direct evaluation; the reference semantics for tseitin tests."""
    if isinstance(f, _Const):
        return f.value
    if isinstance(f, Var):
        return assignment[f.index]
    if isinstance(f, Not):
        return not eval_prop(f.arg, assignment)
    if isinstance(f, And):
        return all(eval_prop(a, assignment) for a in f.args)
    if isinstance(f, Or):
        return any(eval_prop(a, assignment) for a in f.args)
    if isinstance(f, Iff):
        return eval_prop(f.a, assignment) == eval_prop(f.b, assignment)
    raise TypeError(f"not a propositional formula: {f!r}")


def max_var(f: PropFormula) -> int:
    stack, best, seen = [f], 0, set()
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if isinstance(g, Var):
            best = max(best, g.index)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, Iff):
            stack.extend((g.a, g.b))
    return best


def tseitin(f: PropFormula, num_vars: int | None = None) -> Cnf:
    """Equisatisfiable clausal form, linear in the formula size.

    Any model of the result, projected to the variables at or below the
    watermark, satisfies ``f``.  Gate variables are shared between
    physically identical subterms.
    """
    watermark = max(num_vars or 0, max_var(f))
    counter = [watermark]
    clauses: list[list[int]] = []
    memo: dict[int, int] = {}

    def fresh() -> int:
        counter[0] += 1
        return counter[0]

    def lit(g: PropFormula) -> int:
        if isinstance(g, Var):
            return g.index
        if isinstance(g, Not):
            return -lit(g.arg)
        cached = memo.get(id(g))
        if cached is not None:
            return cached
        out = fresh()
        if isinstance(g, And):
            kids = [lit(a) for a in g.args]
            for k in kids:
                clauses.append([-out, k])
            clauses.append([out] + [-k for k in kids])
        elif isinstance(g, Or):
            kids = [lit(a) for a in g.args]
            for k in kids:
                clauses.append([-k, out])
            clauses.append([-out] + kids)
        elif isinstance(g, Iff):
            a, b = lit(g.a), lit(g.b)
            clauses.append([-out, -a, b])
            clauses.append([-out, a, -b])
            clauses.append([out, a, b])
            clauses.append([out, -a, -b])
        else:
            raise TypeError(f"not a propositional formula: {g!r}")
        memo[id(g)] = out
        return out

    if f is TRUE:
        return Cnf([], watermark, watermark)
    if f is FALSE:
        return Cnf([[]], watermark, watermark)
    root = f
    if isinstance(root, And):
        # Top-level conjunctions become clauses directly where possible.
        for g in root.args:
            if isinstance(g, Or) and all(
                isinstance(a, Var) or (isinstance(a, Not) and isinstance(a.arg, Var))
                for a in g.args
            ):
                clauses.append([lit(a) for a in g.args])
            else:
                clauses.append([lit(g)])
    else:
        clauses.append([lit(root)])
    return Cnf(clauses, counter[0], watermark)
