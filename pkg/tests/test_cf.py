from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cfdim.cf import (
    KHINTCHINE_CONSTANT,
    DigitWord,
    convergents,
    cylinder,
    cylinder_length,
    expand,
    khintchine_mc,
    stats,
)
from cfdim.errors import DomainError, PrecisionExhausted
from cfdim.numerics import BigReal
from oracles import all_words, evaluate_cf, mobius_cylinder, mp_expand

words = st.lists(st.integers(min_value=1, max_value=10**6), min_size=1, max_size=12)


def test_expand_rational_terminates():
    e = expand(Fraction(2, 5), 5)
    assert list(e.digits) == [2, 2] and e.terminated


def test_expand_sqrt2():
    assert list(expand(lambda p: BigReal.exact(2, p).sqrt() - 1, 5).digits) == [2] * 5


def test_expand_e_minus_2():
    want = mp_expand(lambda: mpmath.e - 2, 6)
    assert want == [1, 2, 1, 1, 4, 1]
    assert list(expand(lambda p: BigReal.exact(1, p).exp() - 2, 6).digits) == want


def test_expand_deep_matches_oracle():
    want = mp_expand(lambda: mpmath.pi - 3, 300, dps=800)
    assert list(expand(lambda p: BigReal.pi(p) - 3, 300).digits) == want


def test_interval_expansion_runs_out():
    x = BigReal.exact(2, 64).sqrt() - 1
    with pytest.raises(PrecisionExhausted):
        expand(x, 200)


@pytest.mark.parametrize("x", [0, 1, Fraction(3, 2), -Fraction(1, 3)])
def test_expand_domain(x):
    with pytest.raises(DomainError):
        expand(x, 3)


@given(words)
def test_expand_roundtrip_rational(w):
    # canonical form has last digit >= 2 (or is the single word [1] = 1, excluded)
    if w[-1] == 1 and len(w) > 1:
        w = w[:-2] + [w[-2] + 1]
    x = evaluate_cf(w)
    if x == 1:
        return
    e = expand(x, len(w) + 5)
    assert list(e.digits) == w and e.terminated


def test_convergents_examples():
    assert convergents([1, 1, 1, 1, 1]) == [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8)]
    assert convergents([2, 2]) == [(1, 2), (2, 5)]
    p, q = convergents([1, 2, 1, 1, 4, 1])[-1]
    with mpmath.workdps(30):
        assert abs(mpmath.mpf(p) / q - (mpmath.e - 2)) < mpmath.mpf(1) / q**2


@given(words)
def test_convergent_is_evaluation(w):
    for k, (p, q) in enumerate(convergents(w), 1):
        assert Fraction(p, q) == evaluate_cf(w[:k])


def test_cylinder_examples():
    c = cylinder([1])
    assert (c.left, c.right) == (Fraction(1, 2), 1)
    c = cylinder([2])
    assert (c.left, c.right) == (Fraction(1, 3), Fraction(1, 2))
    c = cylinder([1, 1])
    assert (c.left, c.right, c.length) == (Fraction(1, 2), Fraction(2, 3), Fraction(1, 6))
    lo, hi = c.length_bounds()
    assert lo == Fraction(1, 16) and hi == 1 and lo <= c.length <= hi


@given(words)
def test_cylinder_identities(w):
    c = cylinder(w)
    assert (c.left, c.right) == mobius_cylinder(w)
    p, q = c.convergent
    pp, qp = c.previous
    assert c.length == Fraction(1, q * (q + qp)) == cylinder_length(w)
    assert abs(p * qp - pp * q) == 1
    lo, hi = c.length_bounds()
    assert lo <= c.length <= hi


def test_cylinder_roundtrip_small_grid():
    for w in all_words(4, 6):
        c = cylinder(w)
        assert tuple(expand(c.midpoint, len(w)).digits[: len(w)]) == w


@given(words, st.integers(min_value=1, max_value=50))
def test_nesting(w, a):
    parent, child = cylinder(w), cylinder(w + [a])
    assert parent.left <= child.left < child.right <= parent.right


@given(st.lists(st.integers(min_value=1, max_value=20), min_size=1, max_size=5))
def test_children_tile_toward_one_endpoint(w):
    parent = cylinder(w)
    kids = [cylinder(w + [a]) for a in range(1, 30)]
    kids_sorted = sorted(kids, key=lambda c: c.left)
    for a, b in zip(kids_sorted, kids_sorted[1:]):
        assert a.right == b.left
    # consecutive children march monotonically toward the accumulation endpoint
    lefts = [c.left for c in kids]
    inc = all(x < y for x, y in zip(lefts, lefts[1:]))
    dec = all(x > y for x, y in zip(lefts, lefts[1:]))
    assert inc or dec
    outer = kids_sorted[-1].right if dec else kids_sorted[0].left
    assert outer in (parent.left, parent.right)


def test_stats_examples():
    s = stats([3, 1, 4])
    assert s.S == (3, 4, 8) and s.T == (3, 3, 4)
    s = stats([1, 1, 1])
    assert s.S == (1, 2, 3) and s.T == (1, 1, 1)
    s = stats(expand(lambda p: BigReal.exact(1, p).exp() - 2, 6).digits)
    assert s.S[-1] == 10 and s.T[-1] == 4


@given(st.lists(st.integers(min_value=1, max_value=10**30), min_size=1, max_size=30))
def test_stats_monotone(w):
    s = stats(w)
    assert all(a < b for a, b in zip(s.S, s.S[1:]))
    assert all(a <= b for a, b in zip(s.T, s.T[1:]))


def test_digit_word_validation():
    with pytest.raises(DomainError):
        DigitWord([])
    with pytest.raises(DomainError):
        DigitWord([1, 0])


def test_khintchine_deterministic_and_worker_independent():
    a = khintchine_mc(200, 200, seed=5, workers=1)
    b = khintchine_mc(200, 200, seed=5, workers=4)
    assert (a.median, a.q1, a.q3) == (b.median, b.q1, b.q3)
    c = khintchine_mc(200, 200, seed=6, workers=1)
    assert c.median != a.median
    assert a.target == KHINTCHINE_CONSTANT


def test_khintchine_guards():
    with pytest.raises(DomainError):
        khintchine_mc(50, 200)
    with pytest.raises(PrecisionExhausted):
        khintchine_mc(100, 400, bits=64)
