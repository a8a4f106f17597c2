"""Parsing and printing of formulas, sample files, and DIMACS CNF.

Formula grammar (tightest binding first):

    atom   := identifier | true | false | ?0 | ?0{name} | ( expr )
    unary  := (! | X | F | G | ?1 | ?1{name}) unary | atom
    until  := unary  (U  until)?          -- all binary operators are
    conj   := until  (&  conj)?              right-associative
    disj   := conj   (|  disj)?
    impl   := disj   (-> impl)?           -- sugar: a -> b  ==  !a | b
    expr   := impl   ((?2 | ?2{name}) expr)?

``X F G U true false`` are reserved and cannot name propositions.  Named
placeholders with the same name denote one shared placeholder; bare ones are
pairwise distinct.

Sample files:

    props: p q            # ordered universe
    [positive]
    {p} {q} | {q}         # prefix symbols | period symbols
    [negative]
    | {q}

Symbols are ``{}``-wrapped comma- or space-separated proposition names
(``{}`` is the empty symbol), ``|`` separates the prefix from the period,
``#`` starts a comment, and blank lines are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import formulas as F
from .formulas import DagBuilder, Sample, SyntaxDag, arity, is_hole
from .words import LassoWord, canonicalize


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int

    def __str__(self):
        return f"line {self.line}, column {self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} ({span})")
        self.message = message
        self.span = span


# ---------------------------------------------------------------------------
# Formula parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<hole>\?[012](\{[A-Za-z_][A-Za-z0-9_]*\})?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<punct>[!&|()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'ident','hole','op','lparen','rparen','arrow','eof'
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(line, col, 1))
        lexeme = m.group(0)
        span = SourceSpan(line, col, len(lexeme))
        if m.lastgroup == "hole":
            toks.append(_Tok("hole", lexeme, span))
        elif m.lastgroup == "ident":
            toks.append(_Tok("ident", lexeme, span))
        elif m.lastgroup == "arrow":
            toks.append(_Tok("arrow", lexeme, span))
        elif m.lastgroup == "punct":
            kind = {"(": "lparen", ")": "rparen"}.get(lexeme, "op")
            toks.append(_Tok(kind, lexeme, span))
        for ch in lexeme:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(_Tok("eof", "", SourceSpan(line, col, 0)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0
        self.builder = DagBuilder()
        self.hole_kinds: dict[str, str] = {}

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def take(self) -> _Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Tok):
        raise ParseError(message, tok.span)

    def hole_parts(self, tok: _Tok) -> tuple[str, str | None]:
        kind = tok.text[:2]
        name = tok.text[3:-1] if len(tok.text) > 2 else None
        if name is not None:
            prev = self.hole_kinds.setdefault(name, kind)
            if prev != kind:
                self.fail(
                    f"placeholder {tok.text} conflicts with earlier {prev}{{{name}}}", tok
                )
        return kind, name

    def parse(self) -> int:
        root = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(f"unexpected {tok.text!r} after formula", tok)
        return root

    def expr(self) -> int:
        left = self.impl()
        tok = self.peek()
        if tok.kind == "hole" and tok.text.startswith("?2"):
            self.take()
            kind, name = self.hole_parts(tok)
            right = self.expr()
            return self.builder.add(kind, left, right, hole=name)
        return left

    def impl(self) -> int:
        left = self.disj()
        if self.peek().kind == "arrow":
            self.take()
            right = self.impl()
            neg = self.builder.add(F.NOT, left)
            return self.builder.add(F.OR, neg, right)
        return left

    def disj(self) -> int:
        left = self.conj()
        if self.peek().text == "|":
            self.take()
            return self.builder.add(F.OR, left, self.disj())
        return left

    def conj(self) -> int:
        left = self.until()
        if self.peek().text == "&":
            self.take()
            return self.builder.add(F.AND, left, self.conj())
        return left

    def until(self) -> int:
        left = self.unary()
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "U":
            self.take()
            return self.builder.add(F.UNTIL, left, self.until())
        return left

    def unary(self) -> int:
        tok = self.peek()
        if tok.text == "!":
            self.take()
            return self.builder.add(F.NOT, self.unary())
        if tok.kind == "ident" and tok.text in (F.NEXT, F.EVENTUALLY, F.ALWAYS):
            self.take()
            return self.builder.add(tok.text, self.unary())
        if tok.kind == "hole" and tok.text.startswith("?1"):
            self.take()
            kind, name = self.hole_parts(tok)
            return self.builder.add(kind, self.unary(), hole=name)
        return self.atom()

    def atom(self) -> int:
        tok = self.take()
        if tok.kind == "ident":
            if tok.text in (F.TRUE, F.FALSE):
                return self.builder.leaf(tok.text)
            if tok.text in F.RESERVED_WORDS:
                self.fail(f"{tok.text!r} is reserved and cannot be a proposition", tok)
            return self.builder.leaf(tok.text)
        if tok.kind == "hole":
            kind, name = self.hole_parts(tok)
            if kind != F.HOLE0:
                self.fail(f"placeholder {tok.text} needs operands here", tok)
            return self.builder.add(kind, hole=name)
        if tok.kind == "lparen":
            inner = self.expr()
            closing = self.take()
            if closing.kind != "rparen":
                self.fail("expected ')'", closing)
            return inner
        self.fail(f"expected a formula, found {tok.text!r}" if tok.text else
                  "unexpected end of input", tok)


def parse_formula(text: str) -> SyntaxDag:
    """Parse a formula or sketch into its canonical syntax DAG."""
    p = _Parser(text)
    return p.builder.finish(p.parse())


# ---------------------------------------------------------------------------
# Formula printing

_PREC = {F.HOLE2: 0, F.OR: 1, F.AND: 2, F.UNTIL: 3}
_UNARY_PREC = 4
_ATOM_PREC = 5


def format_formula(f: SyntaxDag) -> str:
    """Readable text that re-parses to the same DAG.

    Parentheses are dropped where precedence already disambiguates, except
    that a binary operator nested under a different binary operator keeps
    them.  Anonymous Type-0 placeholders with several parents are printed
    with a synthesized name, so the sharing survives the round trip.
    """
    parents: dict[int, int] = {}
    for n in f.nodes:
        for k in (n.left, n.right):
            if k is not None:
                parents[k] = parents.get(k, 0) + 1
    taken = {n.hole for n in f.nodes if n.hole is not None}
    names: dict[int, str] = {}
    fresh = 0
    for i, n in enumerate(f.nodes):
        if is_hole(n.label) and parents.get(i, 0) > 1 and "#" in (n.hole or ""):
            while f"s{fresh}" in taken:
                fresh += 1
            names[i] = f"s{fresh}"
            taken.add(f"s{fresh}")
            fresh += 1

    def hole_text(i: int, n) -> str:
        name = names.get(i)
        if name is None and "#" not in n.hole:
            name = n.hole
        return n.label + (f"{{{name}}}" if name is not None else "")

    def prec_of(n) -> int:
        if n.label in _PREC:
            return _PREC[n.label]
        if arity(n.label) >= 1:
            return _UNARY_PREC
        return _ATOM_PREC

    def render(i: int) -> tuple[str, int]:
        n = f.nodes[i]
        if arity(n.label) == 0:
            return (hole_text(i, n) if is_hole(n.label) else n.label), _ATOM_PREC
        if arity(n.label) == 1:
            text, p = render(n.left)
            if p < _UNARY_PREC:
                text = f"({text})"
            op = hole_text(i, n) if is_hole(n.label) else n.label
            joiner = "" if op == F.NOT else " "
            return op + joiner + text, _UNARY_PREC
        my = _PREC[n.label]
        ltext, lp = render(n.left)
        if lp <= my or lp < _UNARY_PREC:
            ltext = f"({ltext})"
        rtext, rp = render(n.right)
        if rp < my or (rp < _UNARY_PREC and f.nodes[n.right].label != n.label):
            rtext = f"({rtext})"
        op = hole_text(i, n) if is_hole(n.label) else n.label
        return f"{ltext} {op} {rtext}", my

    return render(0)[0]


# ---------------------------------------------------------------------------
# Sample files

_SYMBOL_RE = re.compile(r"\{([^{}|]*)\}|\||(\S+)")


def _parse_symbols(body: str, line_no: int, col_base: int, props: tuple[str, ...] | None):
    """Parse one word line into (prefix symbols, period symbols)."""
    u: list[frozenset] = []
    v: list[frozenset] = []
    target = u
    seen_bar = False
    for m in _SYMBOL_RE.finditer(body):
        span = SourceSpan(line_no, col_base + m.start(), m.end() - m.start())
        if m.group(0) == "|":
            if seen_bar:
                raise ParseError("second '|' in word", span)
            seen_bar = True
            target = v
            continue
        if m.group(2) is not None:
            raise ParseError(f"expected '{{...}}' symbol, found {m.group(2)!r}", span)
        names = [p for p in re.split(r"[,\s]+", m.group(1).strip()) if p]
        if props is not None:
            for p in names:
                if p not in props:
                    raise ParseError(f"unknown proposition {p!r}", span)
        target.append(frozenset(names))
    if not seen_bar:
        raise ParseError("word needs a '|' between prefix and period",
                         SourceSpan(line_no, col_base, max(len(body), 1)))
    if not v:
        raise ParseError("period of a word must be nonempty",
                         SourceSpan(line_no, col_base, max(len(body), 1)))
    return tuple(u), tuple(v)


def parse_word(text: str, props: tuple[str, ...] | None = None,
               line_no: int = 1) -> LassoWord:
    """Parse a single ``u | v`` word, as used on sample-file lines."""
    u, v = _parse_symbols(text, line_no, 1, props)
    return LassoWord(u, v)


def read_sample(text: str) -> Sample:
    props: tuple[str, ...] | None = None
    sections: dict[str, list[tuple[LassoWord, int]]] = {"positive": [], "negative": []}
    current: str | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        col = len(line) - len(line.lstrip()) + 1
        span = SourceSpan(line_no, col, len(stripped))
        if stripped.startswith("props:"):
            if props is not None:
                raise ParseError("duplicate 'props:' line", span)
            names = stripped[len("props:"):].split()
            if not names:
                raise ParseError("empty proposition universe", span)
            if len(set(names)) != len(names):
                raise ParseError("duplicate proposition in universe", span)
            props = tuple(names)
            continue
        if stripped in ("[positive]", "[negative]"):
            current = stripped[1:-1]
            continue
        if props is None:
            raise ParseError("expected 'props:' before words", span)
        if current is None:
            raise ParseError("word outside of [positive]/[negative] section", span)
        u, v = _parse_symbols(line, line_no, 1, props)
        sections[current].append((LassoWord(u, v), line_no))
    if props is None:
        raise ParseError("missing 'props:' line", SourceSpan(1, 1, 1))
    for cw, pi in [(canonicalize(w), i) for w, i in sections["positive"]]:
        for w2, line_no in sections["negative"]:
            if canonicalize(w2) == cw:
                raise ParseError(
                    f"negative word equals positive word from line {pi}",
                    SourceSpan(line_no, 1, 1),
                )
    return Sample(
        props,
        tuple(w for w, _ in sections["positive"]),
        tuple(w for w, _ in sections["negative"]),
    )


def _format_symbol(sym: frozenset, props: tuple[str, ...]) -> str:
    ordered = [p for p in props if p in sym] + sorted(sym - set(props))
    return "{" + ",".join(ordered) + "}"


def format_word(w: LassoWord, props: tuple[str, ...]) -> str:
    u = " ".join(_format_symbol(s, props) for s in w.u)
    v = " ".join(_format_symbol(s, props) for s in w.v)
    return f"{u} | {v}" if u else f"| {v}"


def write_sample(sample: Sample) -> str:
    lines = ["props: " + " ".join(sample.props), "[positive]"]
    lines += [format_word(w, sample.props) for w in sample.positives]
    lines.append("[negative]")
    lines += [format_word(w, sample.props) for w in sample.negatives]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DIMACS CNF


@dataclass(frozen=True)
class CnfInput:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]


def read_dimacs(text: str) -> CnfInput:
    num_vars = num_clauses = None
    body: list[int] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise ParseError("duplicate DIMACS header", SourceSpan(line_no, 1, len(line)))
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("malformed header, expected 'p cnf <vars> <clauses>'",
                                 SourceSpan(line_no, 1, len(line)))
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("malformed header counts", SourceSpan(line_no, 1, len(line)))
            if num_vars < 0 or num_clauses < 0:
                raise ParseError("negative header counts", SourceSpan(line_no, 1, len(line)))
            continue
        if num_vars is None:
            raise ParseError("clause before DIMACS header", SourceSpan(line_no, 1, len(line)))
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", SourceSpan(line_no, 1, len(tok)))
            if lit != 0 and not 1 <= abs(lit) <= num_vars:
                raise ParseError(f"literal {lit} out of range 1..{num_vars}",
                                 SourceSpan(line_no, 1, len(tok)))
            body.append(lit)
    if num_vars is None:
        raise ParseError("missing DIMACS header", SourceSpan(1, 1, 1))
    clauses: list[tuple[int, ...]] = []
    cur: list[int] = []
    for lit in body:
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        raise ParseError("last clause not terminated by 0", SourceSpan(1, 1, 1))
    if len(clauses) != num_clauses:
        raise ParseError(
            f"header declares {num_clauses} clauses, found {len(clauses)}",
            SourceSpan(1, 1, 1),
        )
    return CnfInput(num_vars, tuple(clauses))


def format_dimacs(num_vars: int, clauses) -> str:
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    lines += [" ".join(str(lit) for lit in c) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"
