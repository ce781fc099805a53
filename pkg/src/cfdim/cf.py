"""Continued-fraction engine: Gauss-map expansion, convergents, cylinders, S_n/T_n.

Rational inputs are expanded exactly through the compiled (or pure-Python)
Lehmer kernel; interval inputs digit by digit with certified floors.
"""

from __future__ import annotations

import math
import os
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Callable, Sequence

import numpy as np

from . import _kernel
from .errors import DomainError, PrecisionExhausted
from .numerics import DEFAULT_SCHEDULE, BigReal

KHINTCHINE_CONSTANT = 1 / math.log(2)


class DigitWord(tuple):
    """Finite non-empty sequence of partial quotients, all >= 1."""

    def __new__(cls, digits):
        digits = tuple(int(d) for d in digits)
        if not digits:
            raise DomainError("a digit word needs at least one digit")
        if min(digits) < 1:
            raise DomainError("partial quotients must be positive integers")
        return super().__new__(cls, digits)

    def __repr__(self) -> str:
        return f"DigitWord({list(self)})"


@dataclass(frozen=True)
class Expansion:
    digits: DigitWord | tuple
    terminated: bool

    def __iter__(self):
        return iter((self.digits, self.terminated))


def _as_fraction(x) -> Fraction | None:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return None


def expand(x, n: int, schedule=DEFAULT_SCHEDULE) -> Expansion:
    """First ``n`` partial quotients of ``x`` in (0, 1).

    ``x`` may be a Fraction (exact; stops at termination), a ``BigReal``
    (each digit certified, raising ``PrecisionExhausted`` once the enclosure
    can no longer decide a floor) or a callable ``precision -> BigReal``
    re-evaluated along ``schedule`` when a digit is ambiguous.
    """
    if n < 1:
        raise DomainError("expand needs n >= 1")
    fx = _as_fraction(x)
    if fx is not None:
        if not (0 < fx < 1):
            raise DomainError(f"x = {fx} is not in (0, 1)")
        digits, done = _kernel.cf_expand(fx.numerator, fx.denominator, n)
        return Expansion(DigitWord(digits), done)
    if isinstance(x, BigReal):
        return Expansion(DigitWord(_expand_interval(x, n)), False)
    if callable(x):
        last_error = None
        for prec in schedule:
            try:
                return Expansion(DigitWord(_expand_interval(x(prec), n)), False)
            except PrecisionExhausted as exc:
                last_error = exc
        raise PrecisionExhausted(f"expansion undecidable within schedule: {last_error}")
    raise TypeError(f"cannot expand {type(x).__name__}")


def _expand_interval(x: BigReal, n: int) -> list[int]:
    if not (x.certainly_gt(0) and x.certainly_lt(1)):
        raise DomainError("x is not certainly in (0, 1)")
    digits = []
    y = x
    for k in range(n):
        if not y.certainly_gt(0):
            raise PrecisionExhausted(f"remainder reaches 0 within precision at digit {k + 1}")
        inv = y.reciprocal()
        a = inv.floor_if_certain()
        if a is None:
            raise PrecisionExhausted(f"digit {k + 1} undecidable: 1/x = {inv!r}")
        digits.append(a)
        y = inv - a
    return digits


def convergents(word: Sequence[int]) -> list[tuple[int, int]]:
    """[(p_1, q_1), ..., (p_n, q_n)] for x = [a_1, ..., a_n]."""
    word = DigitWord(word)
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = []
    for a in word:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        out.append((p, q))
    return out


def _last_two(word: Sequence[int]) -> tuple[int, int, int, int]:
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in word:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q, p_prev, q_prev


@dataclass(frozen=True)
class Cylinder:
    """Rank-n basic interval I_n(a_1, ..., a_n) with exact endpoints."""

    word: DigitWord
    left: Fraction
    right: Fraction
    convergent: tuple[int, int]
    previous: tuple[int, int]

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    @property
    def midpoint(self) -> Fraction:
        return (self.left + self.right) / 2

    def length_bounds(self) -> tuple[Fraction, Fraction]:
        """(prod (a_k+1)^-2, prod a_k^-2) bracketing the length."""
        lo = hi = 1
        for a in self.word:
            lo *= (a + 1) ** 2
            hi *= a * a
        return Fraction(1, lo), Fraction(1, hi)


def cylinder(word: Sequence[int]) -> Cylinder:
    """Exact endpoints {p_n/q_n, (p_n+p_{n-1})/(q_n+q_{n-1})}, ordered."""
    word = DigitWord(word)
    p, q, pp, qp = _last_two(word)
    a = Fraction(p, q)
    b = Fraction(p + pp, q + qp)
    left, right = (a, b) if a < b else (b, a)
    return Cylinder(word, left, right, (p, q), (pp, qp))


def cylinder_length(word: Sequence[int]) -> Fraction:
    """1 / (q_n (q_n + q_{n-1})) without building endpoints."""
    _, q, _, qp = _last_two(word)
    return Fraction(1, q * (q + qp))


@dataclass(frozen=True)
class QuotientStats:
    word: DigitWord
    S: tuple[int, ...]
    T: tuple[int, ...]


def stats(word: Sequence[int]) -> QuotientStats:
    """Running sums S_n and running maxima T_n."""
    word = DigitWord(word)
    return QuotientStats(word, tuple(accumulate(word)), tuple(accumulate(word, max)))


# --------------------------------------------------------------------------
# Khintchine's weak law S_n / (n log n) -> 1/log 2


@dataclass(frozen=True)
class KhintchineSummary:
    samples: int
    depth: int
    bits: int
    seed: int
    median: float
    q1: float
    q3: float
    backend: str

    @property
    def target(self) -> float:
        return KHINTCHINE_CONSTANT


def _sample_ratio(seed: int, index: int, depth: int, bits: int) -> float:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    u = int.from_bytes(rng.bytes(bits // 8), "big")
    while u == 0:
        u = int.from_bytes(rng.bytes(bits // 8), "big")
    total, _, count, _ = _kernel.cf_digit_sum(u, 1 << bits, depth)
    if count < depth:
        raise PrecisionExhausted(
            f"sample {index}: dyadic point with {bits} bits has only {count} digits (< {depth})"
        )
    return total / (depth * math.log(depth))


def khintchine_mc(samples: int, depth: int, seed: int = 0, workers: int | None = None,
                  bits: int | None = None, progress: Callable[[int], None] | None = None) -> KhintchineSummary:
    """Distribution of S_n/(n ln n) over uniform dyadic points with 4n random bits.

    Each sample draws its bits from ``SeedSequence([seed, index])``, so the
    summary is independent of ``workers``.
    """
    if samples < 100 or depth < 100:
        raise DomainError("khintchine_mc needs samples >= 100 and depth >= 100")
    if bits is None:
        bits = 4 * depth
    bits = 8 * ((bits + 7) // 8)
    if workers is None:
        workers = min(8, os.cpu_count() or 1)
    if workers > 1 and _kernel.BACKEND == "gmp":
        with ThreadPoolExecutor(workers) as pool:
            ratios = list(pool.map(lambda i: _sample_ratio(seed, i, depth, bits), range(samples)))
    else:
        ratios = [_sample_ratio(seed, i, depth, bits) for i in range(samples)]
    q1, med, q3 = statistics.quantiles(ratios, n=4, method="inclusive")
    return KhintchineSummary(samples, depth, bits, seed, med, q1, q3, _kernel.BACKEND)
