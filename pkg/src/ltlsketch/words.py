"""Ultimately periodic words stored as (prefix, period) pairs.

A word ``w = u v v v ...`` is kept as the pair ``(u, v)`` of finite symbol
sequences with ``v`` nonempty.  Each symbol is the set of propositions that
hold at that position.  Only the first ``|u| + |v|`` positions carry distinct
suffixes, which is what makes all operations here finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Symbol = frozenset


def symbol(*props: str) -> Symbol:
    """Convenience constructor for a single position's proposition set."""
    return frozenset(props)


@dataclass(frozen=True)
class LassoWord:
    u: tuple[Symbol, ...]
    v: tuple[Symbol, ...]

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(frozenset(s) for s in self.u))
        object.__setattr__(self, "v", tuple(frozenset(s) for s in self.v))
        if not self.v:
            raise ValueError("period of a lasso word must be nonempty")

    @property
    def span(self) -> int:
        """Number of positions carrying (possibly) distinct suffixes."""
        return len(self.u) + len(self.v)

    def propositions(self) -> frozenset:
        out: frozenset = frozenset()
        for s in self.u + self.v:
            out |= s
        return out

    def at(self, t: int) -> Symbol:
        return symbol_at(self, t)

    def __repr__(self):
        def fmt(seq):
            return "".join("{" + ",".join(sorted(s)) + "}" for s in seq)

        return f"LassoWord({fmt(self.u)}|{fmt(self.v)})"


def word(u, v) -> LassoWord:
    """Build a LassoWord from iterables of proposition collections."""
    return LassoWord(tuple(frozenset(s) for s in u), tuple(frozenset(s) for s in v))


def symbol_at(w: LassoWord, t: int) -> Symbol:
    """Symbol at position ``t`` of the infinite word, for any ``t >= 0``."""
    if t < 0:
        raise ValueError(f"position must be nonnegative, got {t}")
    if t < len(w.u):
        return w.u[t]
    return w.v[(t - len(w.u)) % len(w.v)]


def suffix(w: LassoWord, t: int) -> LassoWord:
    """Normalized lasso representation of ``w[t, infinity)``.

    ``t`` must name one of the ``|u| + |v|`` distinct-suffix positions.
    """
    if not 0 <= t < w.span:
        raise ValueError(f"suffix index {t} out of range [0, {w.span})")
    if t <= len(w.u):
        return LassoWord(w.u[t:], w.v)
    k = t - len(w.u)
    return LassoWord((), w.v[k:] + w.v[:k])


def suffix_equal(w1: LassoWord, t1: int, w2: LassoWord, t2: int) -> bool:
    """Whether ``w1[t1, inf) = w2[t2, inf)`` as infinite words.

    Decided by comparing exactly ``b`` symbols, where
    ``b = max(|u1| - t1, |u2| - t2, both clamped at 0) + lcm(|v1|, |v2|)``;
    agreement on that window forces agreement everywhere.
    """
    if not 0 <= t1 < w1.span:
        raise ValueError(f"suffix index {t1} out of range [0, {w1.span})")
    if not 0 <= t2 < w2.span:
        raise ValueError(f"suffix index {t2} out of range [0, {w2.span})")
    b = max(len(w1.u) - t1, len(w2.u) - t2, 0) + math.lcm(len(w1.v), len(w2.v))
    return all(symbol_at(w1, t1 + k) == symbol_at(w2, t2 + k) for k in range(b))


def canonicalize(w: LassoWord) -> LassoWord:
    """Unique minimal representative of the infinite word.

    The period is reduced to its primitive root, then trailing prefix symbols
    are folded into a rotation of the period while the last symbols agree.
    Two words get identical canonical forms iff they denote the same infinite
    word (i.e. iff suffix_equal at index 0 holds).
    """
    u, v = w.u, w.v
    for d in range(1, len(v) + 1):
        if len(v) % d == 0 and v[:d] * (len(v) // d) == v:
            v = v[:d]
            break
    while u and u[-1] == v[-1]:
        u = u[:-1]
        v = v[-1:] + v[:-1]
    return LassoWord(u, v)
