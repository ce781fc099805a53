"""Arbitrary-precision kernel: exact rationals, interval reals, zeta, floors.

``BigReal`` is a closed interval ``[lo, hi]`` of binary floating-point numbers
with outward rounding on every operation, so the exact value of any expression
built from exact inputs is always enclosed.  Elementary functions are computed
a few guard bits above the working precision and widened by one ulp, which
keeps the enclosure sound even where the underlying library only promises
faithful (not correctly) rounded results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Union

import mpmath
from mpmath import libmp
from mpmath.libmp import round_ceiling as _UP
from mpmath.libmp import round_floor as _DOWN

from .errors import DomainError, PrecisionExhausted

ExactRational = Fraction

_mk = mpmath.mp.make_mpf  # wraps a raw tuple without rounding

DEFAULT_PRECISION = 128
GUARD_BITS = 10

Number = Union[int, Fraction, float]


def precision_schedule(start: int = 128, stop: int = 8192) -> list[int]:
    """Doubling precision ladder ``start, 2*start, ..., stop``."""
    out = []
    p = start
    while p <= stop:
        out.append(p)
        p *= 2
    return out


DEFAULT_SCHEDULE = tuple(precision_schedule())


def _to_fraction(t) -> Fraction:
    p, q = libmp.to_rational(t)
    return Fraction(int(p), int(q))


def _mag(t) -> int:
    """Binary exponent bound: |t| < 2**_mag(t)."""
    if t == libmp.fzero:
        return -(10**9)
    return t[2] + t[3]


def _ulp(t, wp):
    if t == libmp.fzero:
        return libmp.fzero
    return libmp.from_man_exp(1, _mag(t) - wp)


def _down(t, wp):
    return libmp.mpf_sub(t, _ulp(t, wp), wp, _DOWN)


def _up(t, wp):
    return libmp.mpf_add(t, _ulp(t, wp), wp, _UP)


def _raw(x, prec, rnd):
    if isinstance(x, int):
        return libmp.from_int(x, prec, rnd)
    if isinstance(x, Fraction):
        return libmp.from_rational(x.numerator, x.denominator, prec, rnd)
    if isinstance(x, float):
        return libmp.from_float(x)
    raise TypeError(f"cannot convert {type(x).__name__} to BigReal")


class BigReal:
    """Certified enclosure ``[lo, hi]`` of a real number.

    ``center`` and ``radius`` describe the same interval as a ball.  All
    arithmetic is outward-rounded at ``precision`` bits.
    """

    __slots__ = ("_lo", "_hi", "precision")

    def __init__(self, lo, hi, precision: int = DEFAULT_PRECISION):
        if libmp.mpf_gt(lo, hi):
            raise ValueError("empty interval")
        self._lo = lo
        self._hi = hi
        self.precision = precision

    # construction ----------------------------------------------------------
    @classmethod
    def exact(cls, x: Number, precision: int = DEFAULT_PRECISION) -> "BigReal":
        """Tightest enclosure of an exact int/Fraction/float at ``precision``."""
        if isinstance(x, BigReal):
            return x
        return cls(_raw(x, precision, _DOWN), _raw(x, precision, _UP), precision)

    @classmethod
    def between(cls, lo: Number, hi: Number, precision: int = DEFAULT_PRECISION) -> "BigReal":
        return cls(_raw(lo, precision, _DOWN), _raw(hi, precision, _UP), precision)

    @classmethod
    def pi(cls, precision: int = DEFAULT_PRECISION) -> "BigReal":
        wp = precision + GUARD_BITS
        return cls(_down(libmp.mpf_pi(wp, _DOWN), wp), _up(libmp.mpf_pi(wp, _UP), wp), precision)

    def _coerce(self, other) -> "BigReal":
        if isinstance(other, BigReal):
            return other
        return BigReal.exact(other, self.precision)

    # views -----------------------------------------------------------------
    @property
    def lo(self) -> mpmath.mpf:
        return _mk(self._lo)

    @property
    def hi(self) -> mpmath.mpf:
        return _mk(self._hi)

    @property
    def center(self) -> mpmath.mpf:
        return _mk(libmp.mpf_shift(libmp.mpf_add(self._lo, self._hi), -1))

    @property
    def radius(self) -> mpmath.mpf:
        return _mk(libmp.mpf_shift(libmp.mpf_sub(self._hi, self._lo, 53, _UP), -1))

    @property
    def lo_fraction(self) -> Fraction:
        return _to_fraction(self._lo)

    @property
    def hi_fraction(self) -> Fraction:
        return _to_fraction(self._hi)

    def relative_radius(self) -> float:
        c = abs(self.center)
        if c == 0:
            return math.inf if self._lo != self._hi else 0.0
        return float(self.radius / c)

    def __float__(self) -> float:
        return float(self.center)

    def __repr__(self) -> str:
        return f"BigReal({mpmath.nstr(self.center, 20)} +/- {mpmath.nstr(self.radius, 3)})"

    def decimal(self, digits: int = 20) -> str:
        return mpmath.nstr(self.center, digits, strip_zeros=False)

    # predicates ------------------------------------------------------------
    def contains(self, value: Number) -> bool:
        v = Fraction(value)
        return self.lo_fraction <= v <= self.hi_fraction

    def contains_interval(self, other: "BigReal") -> bool:
        return libmp.mpf_le(self._lo, other._lo) and libmp.mpf_ge(self._hi, other._hi)

    def overlaps(self, other) -> bool:
        o = self._coerce(other)
        return not (libmp.mpf_lt(self._hi, o._lo) or libmp.mpf_lt(o._hi, self._lo))

    def certainly_lt(self, other) -> bool:
        return libmp.mpf_lt(self._hi, self._coerce(other)._lo)

    def certainly_le(self, other) -> bool:
        return libmp.mpf_le(self._hi, self._coerce(other)._lo)

    def certainly_gt(self, other) -> bool:
        return libmp.mpf_gt(self._lo, self._coerce(other)._hi)

    def certainly_ge(self, other) -> bool:
        return libmp.mpf_ge(self._lo, self._coerce(other)._hi)

    def sign(self) -> int | None:
        """+1/-1 when certain, 0 for the exact point zero, None if straddling."""
        if libmp.mpf_gt(self._lo, libmp.fzero):
            return 1
        if libmp.mpf_lt(self._hi, libmp.fzero):
            return -1
        if self._lo == libmp.fzero and self._hi == libmp.fzero:
            return 0
        return None

    def floor_if_certain(self) -> int | None:
        a = libmp.to_int(libmp.mpf_floor(self._lo))
        b = libmp.to_int(libmp.mpf_floor(self._hi))
        return int(a) if a == b else None

    def ceil_if_certain(self) -> int | None:
        a = libmp.to_int(libmp.mpf_ceil(self._lo))
        b = libmp.to_int(libmp.mpf_ceil(self._hi))
        return int(a) if a == b else None

    # arithmetic ------------------------------------------------------------
    def __neg__(self) -> "BigReal":
        return BigReal(libmp.mpf_neg(self._hi), libmp.mpf_neg(self._lo), self.precision)

    def __add__(self, other) -> "BigReal":
        o = self._coerce(other)
        p = max(self.precision, o.precision)
        return BigReal(libmp.mpf_add(self._lo, o._lo, p, _DOWN), libmp.mpf_add(self._hi, o._hi, p, _UP), p)

    __radd__ = __add__

    def __sub__(self, other) -> "BigReal":
        o = self._coerce(other)
        p = max(self.precision, o.precision)
        return BigReal(libmp.mpf_sub(self._lo, o._hi, p, _DOWN), libmp.mpf_sub(self._hi, o._lo, p, _UP), p)

    def __rsub__(self, other) -> "BigReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "BigReal":
        o = self._coerce(other)
        p = max(self.precision, o.precision)
        zero = libmp.fzero
        if libmp.mpf_ge(self._lo, zero) and libmp.mpf_ge(o._lo, zero):
            return BigReal(libmp.mpf_mul(self._lo, o._lo, p, _DOWN), libmp.mpf_mul(self._hi, o._hi, p, _UP), p)
        pairs = [(self._lo, o._lo), (self._lo, o._hi), (self._hi, o._lo), (self._hi, o._hi)]
        los = [libmp.mpf_mul(a, b, p, _DOWN) for a, b in pairs]
        his = [libmp.mpf_mul(a, b, p, _UP) for a, b in pairs]
        lo = los[0]
        for t in los[1:]:
            if libmp.mpf_lt(t, lo):
                lo = t
        hi = his[0]
        for t in his[1:]:
            if libmp.mpf_gt(t, hi):
                hi = t
        return BigReal(lo, hi, p)

    __rmul__ = __mul__

    def reciprocal(self) -> "BigReal":
        zero = libmp.fzero
        if not (libmp.mpf_gt(self._lo, zero) or libmp.mpf_lt(self._hi, zero)):
            raise DomainError("division by an interval containing zero")
        p = self.precision
        return BigReal(libmp.mpf_div(libmp.fone, self._hi, p, _DOWN), libmp.mpf_div(libmp.fone, self._lo, p, _UP), p)

    def __truediv__(self, other) -> "BigReal":
        o = self._coerce(other)
        p = max(self.precision, o.precision)
        zero = libmp.fzero
        if libmp.mpf_ge(self._lo, zero) and libmp.mpf_gt(o._lo, zero):
            return BigReal(libmp.mpf_div(self._lo, o._hi, p, _DOWN), libmp.mpf_div(self._hi, o._lo, p, _UP), p)
        return self * o.reciprocal()

    def __rtruediv__(self, other) -> "BigReal":
        return self._coerce(other) / self

    def __pow__(self, k) -> "BigReal":
        if isinstance(k, int):
            if k < 0:
                return (self ** (-k)).reciprocal()
            result = BigReal.exact(1, self.precision)
            base = self
            while k:
                if k & 1:
                    result = result * base
                k >>= 1
                if k:
                    base = base * base
            return result
        return power(self, k)

    def exp(self) -> "BigReal":
        p = self.precision
        wp = p + GUARD_BITS
        return BigReal(_down(libmp.mpf_exp(self._lo, wp, _DOWN), wp), _up(libmp.mpf_exp(self._hi, wp, _UP), wp), p)

    def log(self) -> "BigReal":
        if not libmp.mpf_gt(self._lo, libmp.fzero):
            raise DomainError("log of a non-positive interval")
        p = self.precision
        wp = p + GUARD_BITS
        return BigReal(_down(libmp.mpf_log(self._lo, wp, _DOWN), wp), _up(libmp.mpf_log(self._hi, wp, _UP), wp), p)

    def sqrt(self) -> "BigReal":
        if libmp.mpf_lt(self._lo, libmp.fzero):
            raise DomainError("sqrt of a negative interval")
        p = self.precision
        wp = p + GUARD_BITS
        return BigReal(_down(libmp.mpf_sqrt(self._lo, wp, _DOWN), wp), _up(libmp.mpf_sqrt(self._hi, wp, _UP), wp), p)

    def with_precision(self, precision: int) -> "BigReal":
        return BigReal(self._lo, self._hi, precision)

    def hull(self, other: "BigReal") -> "BigReal":
        lo = self._lo if libmp.mpf_le(self._lo, other._lo) else other._lo
        hi = self._hi if libmp.mpf_ge(self._hi, other._hi) else other._hi
        return BigReal(lo, hi, max(self.precision, other.precision))

    def widen(self, r: Number) -> "BigReal":
        """Add ``[-r, r]`` (``r >= 0``) to the enclosure."""
        rr = _raw(r, 53, _UP) if not isinstance(r, tuple) else r
        p = self.precision
        return BigReal(libmp.mpf_sub(self._lo, rr, p, _DOWN), libmp.mpf_add(self._hi, rr, p, _UP), p)


def as_real(x, precision: int = DEFAULT_PRECISION) -> BigReal:
    if isinstance(x, BigReal):
        return x
    return BigReal.exact(x, precision)


def power(base, exponent, precision: int | None = None) -> BigReal:
    """``base ** exponent`` for a positive base; exact shortcuts for integer exponents."""
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exponent = int(exponent)
    if precision is None:
        precision = base.precision if isinstance(base, BigReal) else DEFAULT_PRECISION
    b = as_real(base, precision)
    if isinstance(exponent, int):
        return b**exponent
    if isinstance(exponent, Fraction) and exponent == Fraction(1, 2):
        return b.sqrt()
    return (as_real(exponent, precision) * b.log()).exp()


def exp(x, precision: int = DEFAULT_PRECISION) -> BigReal:
    return as_real(x, precision).exp()


def log(x, precision: int = DEFAULT_PRECISION) -> BigReal:
    return as_real(x, precision).log()


# --------------------------------------------------------------------------
# zeta


@lru_cache(maxsize=None)
def _bernoulli_over_factorial(j: int) -> Fraction:
    """B_{2j} / (2j)! as an exact fraction."""
    p, q = mpmath.bernfrac(2 * j)
    return Fraction(int(p), int(q)) / math.factorial(2 * j)


def _zeta_plan(t: float, target_bits: float) -> tuple[int, int]:
    """Choose (N, p): head terms and Euler-Maclaurin corrections.

    Remainder bound used: 4 (t)_{2p-1} N^{1-t-2p} / (2 pi)^{2p}.
    """
    n = 8
    while True:
        log2_bound = math.log2(4.0)
        rising = 0.0
        for p in range(1, 4 * n):
            # rising factorial (t)_{2p-1}: multiply in t+2p-3 and t+2p-2
            if p == 1:
                rising = math.log2(t)
            else:
                rising += math.log2(t + 2 * p - 3) + math.log2(t + 2 * p - 2)
            log2_bound = 2 + rising + (1 - t - 2 * p) * math.log2(n) - 2 * p * math.log2(2 * math.pi)
            if log2_bound < -target_bits:
                return n, p
        n *= 2


def zeta(t, precision: int = 64) -> BigReal:
    """Certified enclosure of the Riemann zeta function at a real ``t > 1``.

    Euler-Maclaurin summation with an explicit remainder enclosure; the
    returned radius is at most ``2**(4 - precision)`` for exact ``t``.
    """
    if precision < 32:
        raise DomainError("zeta needs precision >= 32 bits")
    if isinstance(t, BigReal):
        if not t.certainly_gt(1):
            raise DomainError("zeta(t) requires t > 1; the interval reaches the pole at t = 1")
        t_lo = float(t.lo)
        t_hi = float(t.hi)
    else:
        if Fraction(t) <= 1:
            raise DomainError(f"zeta(t) requires t > 1 (pole at 1), got t = {t}")
        t_lo = t_hi = float(t)
    t_lo = max(t_lo, 1.0 + 1e-300)
    pole_bits = max(0.0, -math.log2(t_lo - 1.0)) if t_lo > 1.0 else 64.0
    target = precision + 8 + pole_bits
    wp = precision + 24 + int(pole_bits)
    for _ in range(4):
        value = _zeta_em(t, t_hi, target, wp)
        if float(value.radius) <= 2.0 ** (4 - precision):
            return value.with_precision(precision)
        wp *= 2
        target += 16
    return value.with_precision(precision)


def _zeta_em(t, t_hi: float, target_bits: float, wp: int) -> BigReal:
    n, p = _zeta_plan(t_hi, target_bits)
    tt = as_real(t, wp).with_precision(wp)
    s = BigReal.exact(0, wp)
    for k in range(1, n):
        s = s + (-tt * BigReal.exact(k, wp).log()).exp()
    logn = BigReal.exact(n, wp).log()
    n_pow = (-tt * logn).exp()  # N^{-t}
    s = s + n_pow * n / (tt - 1) + n_pow / 2
    rising = tt  # (t)_{2j-1}
    n_inv2 = BigReal.exact(Fraction(1, n * n), wp)
    term_pow = n_pow / n  # N^{-t-1}
    for j in range(1, p + 1):
        if j > 1:
            rising = rising * (tt + (2 * j - 3)) * (tt + (2 * j - 2))
            term_pow = term_pow * n_inv2
        s = s + rising * term_pow * _bernoulli_over_factorial(j)
    # remainder bound 4 (t)_{2p-1} N^{1-t-2p} / (2 pi)^{2p}, evaluated at the interval's top
    two_pi_lo = libmp.mpf_shift(libmp.mpf_pi(64, _DOWN), 1)
    rem = libmp.mpf_mul(rising._hi, term_pow._hi, 64, _UP)
    rem = libmp.mpf_shift(rem, 2)
    rem = libmp.mpf_div(rem, libmp.mpf_pow_int(two_pi_lo, 2 * p, 64, _DOWN), 64, _UP)
    return s.widen(rem)


# --------------------------------------------------------------------------
# certified floors


def certified_floor(x, schedule: Iterable[int] = DEFAULT_SCHEDULE) -> int:
    """Exact floor of ``x``.

    ``x`` may be an int, a Fraction, a ``BigReal`` (single attempt) or a
    callable ``precision -> BigReal`` that is re-evaluated along
    ``schedule`` until the enclosure no longer straddles an integer.
    """
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return math.floor(x)
    if isinstance(x, BigReal):
        f = x.floor_if_certain()
        if f is None:
            raise PrecisionExhausted(f"floor undecidable: {x!r} straddles an integer")
        return f
    last = None
    for prec in schedule:
        last = x(prec)
        f = last.floor_if_certain()
        if f is not None:
            return f
    raise PrecisionExhausted(f"floor undecidable after precision schedule; last enclosure {last!r}")


def certified_ceil(x, schedule: Iterable[int] = DEFAULT_SCHEDULE) -> int:
    if isinstance(x, (int, Fraction)):
        return math.ceil(x)
    if isinstance(x, BigReal):
        return -certified_floor(-x)
    return -certified_floor(lambda prec: -x(prec), schedule)


def certified_sign(x: Callable[[int], BigReal], schedule: Iterable[int] = DEFAULT_SCHEDULE) -> int:
    """Sign of a real given by ``precision -> BigReal``; raises if it stays ambiguous."""
    last = None
    for prec in schedule:
        last = x(prec)
        s = last.sign()
        if s is not None:
            return s
    raise PrecisionExhausted(f"sign undecidable after precision schedule; last enclosure {last!r}")


def magnitude_schedule(bits: float, schedule: Iterable[int] = DEFAULT_SCHEDULE) -> list[int]:
    """Shift a schedule up so absolute error stays below 1 for values near ``2**bits``."""
    extra = max(0, int(math.ceil(bits)))
    return [p + extra for p in schedule]


# --------------------------------------------------------------------------
# growth functions

E = math.e


def _psi_invlog(x: BigReal) -> BigReal:
    return 1 / (x + BigReal.exact(1, x.precision).exp()).log()


def _psi_invsqrtlog(x: BigReal) -> BigReal:
    return 1 / (x + BigReal.exact(1, x.precision).exp()).log().sqrt()


PSI_FUNCTIONS: dict[str, Callable[[BigReal], BigReal]] = {
    # 1 / log(x + e): positive, C^1, decreasing to 0 slower than any power
    "invlog": _psi_invlog,
    # 1 / sqrt(log(x + e))
    "invsqrtlog": _psi_invsqrtlog,
}


def psi_value(name: str, x: Number, precision: int = DEFAULT_PRECISION) -> BigReal:
    try:
        fn = PSI_FUNCTIONS[name]
    except KeyError:
        raise DomainError(f"unknown psi function {name!r}; choose from {sorted(PSI_FUNCTIONS)}") from None
    return fn(as_real(x, precision))


GROWTH_FAMILIES = ("exp-power", "exp-sqrt-psi", "exp-geom", "poly", "linear")


@dataclass(frozen=True)
class GrowthFunction:
    """A normalising sequence phi(n), evaluable to any precision.

    ``param`` is an exact rational exponent/rate, or a psi name for the
    ``exp-sqrt-psi`` family.
    """

    family: str
    param: Union[Fraction, str]

    def __post_init__(self):
        if self.family not in GROWTH_FAMILIES:
            raise DomainError(f"unknown growth family {self.family!r}")
        if self.family == "exp-sqrt-psi":
            if self.param not in PSI_FUNCTIONS:
                raise DomainError(f"unknown psi function {self.param!r}")
        else:
            object.__setattr__(self, "param", Fraction(self.param))
            if self.param <= 0:
                raise DomainError("growth parameter must be positive")
            if self.family == "exp-geom" and self.param <= 1:
                raise DomainError("exp-geom needs gamma > 1")

    @classmethod
    def parse(cls, text: str) -> "GrowthFunction":
        """Parse ``family:param`` such as ``exp-power:0.6`` or ``exp-sqrt-psi:invlog``."""
        family, _, param = text.partition(":")
        if not param:
            raise DomainError(f"growth spec {text!r} must look like family:param")
        if family != "exp-sqrt-psi":
            try:
                param = Fraction(param)
            except ValueError:
                raise DomainError(f"bad growth parameter {param!r}") from None
        return cls(family, param)

    def __str__(self) -> str:
        return f"{self.family}:{self.param}"

    def log_value(self, n: int, precision: int = DEFAULT_PRECISION) -> BigReal:
        """Enclosure of log phi(n)."""
        if n < 1:
            raise DomainError("growth functions are evaluated at n >= 1")
        nn = BigReal.exact(n, precision)
        f, g = self.family, self.param
        if f == "exp-power":
            return power(nn, g)
        if f == "exp-geom":
            return power(BigReal.exact(g, precision), n)
        if f == "exp-sqrt-psi":
            return nn.sqrt() * PSI_FUNCTIONS[g](nn)
        if f == "poly":
            return as_real(g, precision) * nn.log()
        return (nn * g).log()

    def value(self, n: int, precision: int = DEFAULT_PRECISION) -> BigReal:
        if n < 1:
            raise DomainError("growth functions are evaluated at n >= 1")
        if self.family == "linear":
            return BigReal.exact(self.param * n, precision)
        if self.family == "poly" and self.param.denominator == 1:
            return BigReal.exact(n ** int(self.param), precision)
        return self.log_value(n, precision).exp()

    def magnitude_bits(self, n: int) -> float:
        """Rough log2 phi(n), for sizing working precision."""
        return float(self.log_value(n, 53).hi) / math.log(2)


def eval_growth(phi: GrowthFunction, n: int, precision: int = DEFAULT_PRECISION) -> BigReal:
    """Enclosure of phi(n) with relative radius at most ``2**(8 - precision)``."""
    if n < 1:
        raise DomainError(f"phi(n) needs n >= 1, got {n}")
    extra = max(0, int(math.log2(max(1.0, abs(float(phi.log_value(n, 53).hi)))))) + 1
    wp = precision + extra + 16
    for _ in range(6):
        v = phi.value(n, wp)
        if v.relative_radius() <= 2.0 ** (8 - precision):
            return v.with_precision(precision)
        wp *= 2
    raise PrecisionExhausted(f"could not reach relative radius 2^{8 - precision} for phi({n})")
