"""Independent reference computations used only by the tests.

Each oracle takes a different route from the production code: enumeration
instead of convolution, direct summation instead of Euler-Maclaurin, plain
Euclid instead of Lehmer, Mobius evaluation instead of the convergent
recurrence.
"""

from fractions import Fraction
from itertools import product

import mpmath


def compositions(m, n):
    """All ordered n-tuples of positive integers summing to m."""
    if n == 1:
        yield (m,)
        return
    for first in range(1, m - n + 2):
        for rest in compositions(m - first, n - 1):
            yield (first,) + rest


def brute_composition_sum(m, n, t, dps=40):
    with mpmath.workdps(dps):
        t = mpmath.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) else mpmath.mpf(t)
        return mpmath.fsum(mpmath.fprod(mpmath.power(i, -t) for i in c) for c in compositions(m, n))


def direct_zeta(t, terms=10**5, dps=30):
    """(lo, hi) bracket: partial sum plus integral tail bounds."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t.numerator) / t.denominator if isinstance(t, Fraction) else mpmath.mpf(t)
        s = mpmath.fsum(mpmath.power(k, -t) for k in range(1, terms + 1))
        lo = s + mpmath.power(terms + 1, 1 - t) / (t - 1)
        hi = s + mpmath.power(terms, 1 - t) / (t - 1)
        return lo, hi


def euclid_cf(p, q):
    """Digits of p/q in (0, 1) by plain Euclid."""
    digits = []
    a, b = q, p
    while b:
        digits.append(a // b)
        a, b = b, a % b
    return digits


def evaluate_cf(word, tail=0):
    """[a_1, ..., a_n + tail] by back-substitution."""
    x = Fraction(tail)
    for a in reversed(word):
        x = 1 / (a + x)
    return x


def mobius_cylinder(word):
    """Endpoints of the cylinder: images of 0 and 1 under the word's Mobius map."""
    a = evaluate_cf(word, 0)
    b = evaluate_cf(list(word[:-1]) + [word[-1] + 1], 0)
    return min(a, b), max(a, b)


def mp_expand(expr, n, dps=200):
    with mpmath.workdps(dps):
        x = expr()
        out = []
        for _ in range(n):
            y = 1 / x
            a = int(mpmath.floor(y))
            out.append(a)
            x = y - a
        return out


def rho_direct(n, gamma, d=2):
    num = sum(Fraction(j) ** gamma for j in range(1, n))
    tot = sum(Fraction(j) ** gamma for j in range(1, n + 1))
    return num / (d * tot - (d - 1) * Fraction(n) ** gamma)


def all_words(max_len, max_digit):
    for L in range(1, max_len + 1):
        yield from product(range(1, max_digit + 1), repeat=L)
