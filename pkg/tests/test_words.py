import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlsketch.words import (
    LassoWord,
    canonicalize,
    suffix,
    suffix_equal,
    symbol,
    symbol_at,
)

PQ = ("p", "q", "r")


def sym(*names):
    return frozenset(names)


words = st.builds(
    LassoWord,
    st.lists(st.sets(st.sampled_from(PQ)).map(frozenset), max_size=5).map(tuple),
    st.lists(st.sets(st.sampled_from(PQ)).map(frozenset), min_size=1, max_size=4).map(tuple),
)


def test_period_must_be_nonempty():
    with pytest.raises(ValueError):
        LassoWord((sym("p"),), ())


def test_symbol_at_prefix():
    w = LassoWord((sym("p"), sym("q")), (sym("r"),))
    assert symbol_at(w, 0) == sym("p")


def test_symbol_at_period_after_prefix():
    w = LassoWord((sym("p"), sym("q")), (sym("r"),))
    assert symbol_at(w, 5) == sym("r")


def test_symbol_at_wraps_modulo_period():
    w = LassoWord((), (sym("p"), sym("q")))
    assert symbol_at(w, 7) == sym("q")


def test_suffix_into_period_drops_prefix():
    w = LassoWord((sym("p"),), (sym("q"),))
    assert suffix(w, 1) == LassoWord((), (sym("q"),))


def test_suffix_rotates_period():
    w = LassoWord((sym("p"), sym("q")), (sym("r"), sym("s")))
    assert suffix(w, 3) == LassoWord((), (sym("s"), sym("r")))


def test_suffix_zero_is_identity():
    w = LassoWord((sym("p"),), (sym("q"), sym("r")))
    assert suffix(w, 0) == w


def test_suffix_rejects_out_of_range():
    w = LassoWord((sym("p"),), (sym("q"),))
    with pytest.raises(ValueError):
        suffix(w, 2)
    with pytest.raises(ValueError):
        suffix(w, -1)


def test_suffix_equal_example_pair():
    alpha = LassoWord((sym("p"),), (sym("q"),))
    beta = LassoWord((), (sym("q"),))
    assert suffix_equal(alpha, 1, beta, 0)


def test_suffix_equal_reflexive_case():
    w = LassoWord((sym("p"),), (sym("q"), sym("r")))
    assert suffix_equal(w, 1, w, 1)


def test_suffix_equal_detects_difference():
    w = LassoWord((), (sym("p"), sym("q")))
    assert not suffix_equal(w, 0, w, 1)


def test_suffix_equal_rejects_out_of_range():
    w = LassoWord((), (sym("p"),))
    with pytest.raises(ValueError):
        suffix_equal(w, 1, w, 0)


@given(words, words, st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=300)
def test_suffix_equal_matches_long_prefix_comparison(w1, w2, t1, t2):
    t1 %= w1.span
    t2 %= w2.span
    naive = all(symbol_at(w1, t1 + k) == symbol_at(w2, t2 + k) for k in range(1000))
    assert suffix_equal(w1, t1, w2, t2) == naive


@given(st.lists(st.tuples(words, st.integers(0, 20)), min_size=2, max_size=5))
@settings(max_examples=150)
def test_suffix_equal_is_an_equivalence(pairs):
    pairs = [(w, t % w.span) for w, t in pairs]
    for w, t in pairs:
        assert suffix_equal(w, t, w, t)
    for a, b in zip(pairs, pairs[1:]):
        assert suffix_equal(*a, *b) == suffix_equal(*b, *a)
    for a in pairs:
        for b in pairs:
            for c in pairs:
                if suffix_equal(*a, *b) and suffix_equal(*b, *c):
                    assert suffix_equal(*a, *c)


def test_canonicalize_reduces_period_to_primitive_root():
    w = LassoWord((sym("p"),), (sym("q"), sym("q")))
    assert canonicalize(w) == LassoWord((sym("p"),), (sym("q"),))


def test_canonicalize_folds_prefix_into_period():
    w = LassoWord((sym("q"),), (sym("q"),))
    assert canonicalize(w) == LassoWord((), (sym("q"),))


@given(words)
@settings(max_examples=300)
def test_canonicalize_preserves_the_infinite_word(w):
    assert suffix_equal(canonicalize(w), 0, w, 0)


@given(words)
@settings(max_examples=300)
def test_canonicalize_is_idempotent(w):
    assert canonicalize(canonicalize(w)) == canonicalize(w)


@given(words, st.integers(1, 3), st.integers(0, 3))
@settings(max_examples=200)
def test_canonical_forms_identify_equal_words(w, repeat, unfold):
    # Pump the period and unfold it into the prefix: same infinite word,
    # different representation.
    stretched = LassoWord(w.u + w.v * unfold, w.v * repeat)
    assert suffix_equal(stretched, 0, w, 0)
    assert canonicalize(stretched) == canonicalize(w)


@given(words, words)
@settings(max_examples=300)
def test_canonical_equality_iff_suffix_equal(w1, w2):
    assert (canonicalize(w1) == canonicalize(w2)) == suffix_equal(w1, 0, w2, 0)


@given(words, st.integers(0, 20), st.integers(0, 20))
@settings(max_examples=200)
def test_symbol_at_commutes_with_suffix(w, t0, delta):
    t0 %= w.span
    assert symbol_at(w, t0 + delta) == symbol_at(suffix(w, t0), delta)


def test_lemma_window_is_tight_enough():
    # Comparing one symbol fewer than the lemma window must be insufficient
    # for some pair; this guards against silently shrinking the bound.
    w1 = LassoWord((), (sym(), sym(), sym("p")))
    w2 = LassoWord((), (sym(), sym(), sym(), sym(), sym("p"), sym()))
    b = max(0, 0) + math.lcm(3, 6)
    agree = sum(
        1 for k in range(b) if symbol_at(w1, k) == symbol_at(w2, k)
    )
    assert not suffix_equal(w1, 0, w2, 0)
    assert agree < b  # they differ inside the window, never beyond it
