"""Composition sums and the zeta bound that controls them.

For a composition (i_1, ..., i_n) of m into n positive parts, the weight is
prod i_k^{-t}.  The total weight over all compositions is bounded by
((9/2)(2 + zeta(t)))^n m^{-t} for 1 < t < 2; the same constant is reused with
t = d*s for d-decaying systems, where it is checked empirically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import DomainError
from .numerics import BigReal, as_real, precision_schedule, zeta

NINE_HALVES = Fraction(9, 2)


class CompositionSumQuery(NamedTuple):
    m: int
    n: int
    t: Fraction | float | int


def _check_mn(m: int, n: int) -> None:
    if m < 1 or n < 1:
        raise DomainError(f"m and n must be positive integers, got m={m}, n={n}")


def _check_t_positive(t) -> None:
    if Fraction(t) <= 0:
        raise DomainError(f"exponent t must be positive, got {t}")


def composition_table(m_max: int, n_max: int, t, precision: int = 64) -> list[list[BigReal]]:
    """``table[n][m]`` = sum over compositions of m into n parts, for all n <= n_max, m <= m_max.

    g_1(j) = j^{-t}; g_k = g_{k-1} * g_1 (convolution truncated at m_max).
    Index 0 rows/columns hold exact zeros.  O(n_max * m_max^2) interval ops.
    """
    _check_mn(m_max, n_max)
    _check_t_positive(t)
    zero = BigReal.exact(0, precision)
    tt = as_real(t, precision)
    g1 = [zero] + [(-tt * BigReal.exact(j, precision).log()).exp() for j in range(1, m_max + 1)]
    g1[1] = BigReal.exact(1, precision)
    table = [[zero] * (m_max + 1), g1]
    for k in range(2, n_max + 1):
        prev = table[-1]
        row = [zero] * (m_max + 1)
        for j in range(k, m_max + 1):
            acc = zero
            # parts: last part i, remaining j - i split into k - 1 parts (needs j - i >= k - 1)
            for i in range(1, j - k + 2):
                acc = acc + prev[j - i] * g1[i]
            row[j] = acc
        table.append(row)
    return table


def composition_sum(m: int, n: int, t, precision: int = 64) -> BigReal:
    """Certified sum of prod i_k^{-t} over compositions of m into n parts (exact 0 if n > m)."""
    _check_mn(m, n)
    _check_t_positive(t)
    if n > m:
        return BigReal.exact(0, precision)
    if n == m:
        return BigReal.exact(1, precision)
    return composition_table(m, n, t, precision)[n][m]


def generalized_bound_constant(t, precision: int = 64) -> BigReal:
    """(9/2)(2 + zeta(t)); finite only for t > 1."""
    if Fraction(t) <= 1 if not isinstance(t, BigReal) else not t.certainly_gt(1):
        raise DomainError(f"bound constant needs t > 1 (zeta pole at 1), got t = {t}")
    return (zeta(t, max(precision, 32)) + 2) * NINE_HALVES


def lemma_bound(m: int, n: int, t, precision: int = 64) -> BigReal:
    """((9/2)(2 + zeta(t)))^n m^{-t}."""
    _check_mn(m, n)
    c = generalized_bound_constant(t, precision)
    tt = as_real(t, c.precision)
    return c**n * (-tt * BigReal.exact(m, c.precision).log()).exp()


@dataclass
class LemmaReport:
    checked: int = 0
    violations: list[tuple[int, int, Fraction]] = field(default_factory=list)
    indeterminate: list[tuple[int, int, Fraction]] = field(default_factory=list)
    max_ratio: float = 0.0
    argmax: tuple[int, int, Fraction] | None = None

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_lemma(m_max: int, n_max: int, s_values: Iterable, *, d: int = 2, m_min: int = 1,
                 precision: int = 64, max_precision: int = 1024) -> LemmaReport:
    """Check composition_sum(m, n, d*s) <= lemma_bound(m, n, d*s) for n <= m <= m_max, n <= n_max.

    A violation needs LHS.lo > RHS.hi; overlapping enclosures are recomputed
    at doubled precision and reported as indeterminate if they never separate.
    """
    report = LemmaReport()
    for s in s_values:
        s = Fraction(s)
        t = d * s
        if t <= 1:
            raise DomainError(f"d*s = {t} <= 1: the bound is infinite")
        lhs = composition_table(m_max, n_max, t, precision)
        c = generalized_bound_constant(t, precision)
        for n in range(1, n_max + 1):
            for m in range(max(n, m_min), m_max + 1):
                verdict, ratio = _compare(lhs[n][m], _bound_from_constant(c, m, n, t))
                prec = precision
                while verdict is None and prec < max_precision:
                    prec *= 2
                    verdict, ratio = _compare(composition_sum(m, n, t, prec), lemma_bound(m, n, t, prec))
                report.checked += 1
                if verdict is None:
                    report.indeterminate.append((m, n, s))
                elif not verdict:
                    report.violations.append((m, n, s))
                if ratio > report.max_ratio:
                    report.max_ratio = ratio
                    report.argmax = (m, n, s)
    return report


def _bound_from_constant(c: BigReal, m: int, n: int, t) -> BigReal:
    tt = as_real(t, c.precision)
    return c**n * (-tt * BigReal.exact(m, c.precision).log()).exp()


def _compare(lhs: BigReal, rhs: BigReal) -> tuple[bool | None, float]:
    ratio = float(lhs.center / rhs.center)
    if lhs.certainly_le(rhs):
        return True, ratio
    if lhs.certainly_gt(rhs):
        return False, ratio
    return None, ratio


__all__ = [
    "CompositionSumQuery",
    "composition_table",
    "composition_sum",
    "generalized_bound_constant",
    "lemma_bound",
    "verify_lemma",
    "LemmaReport",
    "precision_schedule",
]
