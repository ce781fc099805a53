"""d-decaying Gauss-like iterated function systems.

Two concrete systems: the Gauss map's inverse branches f_i(x) = 1/(i + x)
and an affine model with branch widths w_i = i^{-d}/zeta(d).  Branch order
follows the Gauss map: larger digits map further left, and branch i owns the
half-open image (T_{i+1}, T_i].
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .dimension import ProfileQuery, local_dimension_profile
from .errors import AmbiguousBoundary, DomainError, PrecisionExhausted, Unsupported
from .numerics import DEFAULT_SCHEDULE, BigReal, GrowthFunction, as_real, power, zeta

MAX_BRANCH = 10**6


def _frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass
class ConditionCheck:
    name: str
    passed: bool
    detail: str


class DDecayingSystem:
    """Base class: subclasses provide branches, derivative bounds and images."""

    model = "abstract"
    d: Fraction
    m: int
    A: Fraction
    precision: int

    def apply(self, i: int, x):
        raise NotImplementedError

    def invert(self, i: int, y):
        raise NotImplementedError

    def xi(self, i: int) -> BigReal:
        raise NotImplementedError

    def lam(self, i: int) -> BigReal:
        raise NotImplementedError

    def image(self, i: int) -> tuple[BigReal, BigReal]:
        """(left, right) endpoints of f_i([0, 1])."""
        raise NotImplementedError

    def branch_of(self, y) -> int:
        raise NotImplementedError

    def with_precision(self, precision: int) -> "DDecayingSystem":
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"model": self.model, "d": str(self.d), "precision": self.precision}

    def check_conditions(self, i_max: int = 1000, eps_grid: Sequence = (Fraction(1, 2), Fraction(1, 10))) -> list[ConditionCheck]:
        return [self.check_contraction(i_max), self.check_disjoint(i_max), *self.check_decay(i_max, eps_grid)]

    def check_disjoint(self, i_max: int) -> ConditionCheck:
        """Images are ordered right-to-left with shared endpoints only."""
        bad = []
        for i in range(1, i_max):
            left_i, _ = self.image(i)
            _, right_next = self.image(i + 1)
            if right_next.certainly_gt(left_i):
                bad.append(i)
            if not self.image(i)[0].certainly_lt(self.image(i)[1]):
                bad.append(i)
        return ConditionCheck("disjoint interiors", not bad, f"{i_max} branches, overlaps at {bad[:5]}")

    def check_decay(self, i_max: int, eps_grid) -> list[ConditionCheck]:
        """C_1/i^{d+eps} <= xi_i <= lam_i <= C_2/i^{d-eps}: xi_i i^{d+eps} bounded below, lam_i i^{d-eps} above.

        Reported constants are the extrema over i <= i_max; the trend flags
        require xi_i i^{d+eps} not to decrease and lam_i i^{d-eps} not to
        increase between i_max/10 and i_max.
        """
        out = []
        for eps in eps_grid:
            eps = _frac(eps)
            lo_vals, hi_vals = {}, {}
            for i in _grid(i_max):
                ii = BigReal.exact(i, self.precision)
                lo_vals[i] = self.xi(i) * power(ii, self.d + eps)
                hi_vals[i] = self.lam(i) * power(ii, self.d - eps)
            c1 = min(float(v.lo) for v in lo_vals.values())
            c2 = max(float(v.hi) for v in hi_vals.values())
            a, b = i_max // 10, i_max
            ordered = not any(self.xi(i).certainly_gt(self.lam(i)) for i in lo_vals)
            trend = lo_vals[b].certainly_ge(lo_vals[a]) and hi_vals[b].certainly_le(hi_vals[a]) if eps > 0 else True
            ok = c1 > 0 and math.isfinite(c2) and ordered and trend
            out.append(ConditionCheck(f"{self.d}-decay at eps={eps}", ok, f"C1={c1:.6g}, C2={c2:.6g}, trend={'ok' if trend else 'bad'}"))
        return out

    def check_contraction(self, i_max: int) -> ConditionCheck:
        raise NotImplementedError


def _grid(i_max: int) -> list[int]:
    pts = {1, 2, 3, 5, i_max, i_max // 10 or 1}
    x = 1.0
    while x < i_max:
        pts.add(int(x))
        x *= 1.5
    return sorted(p for p in pts if 1 <= p <= i_max)


# --------------------------------------------------------------------------
# affine model


class AffineGaussLike(DDecayingSystem):
    """f_i(x) = T_{i+1} + w_i (1 - x) with w_i = i^{-d}/zeta(d), T_i = sum_{j>=i} w_j."""

    model = "affine"

    def __init__(self, d, precision: int = 128):
        d = _frac(d)
        if d <= 1:
            raise DomainError(f"d = {d} <= 1: weights i^-d are not summable (zeta pole)")
        self.d = d
        self.precision = precision
        self.m = 1
        self.zeta_d = zeta(d, precision + 16).with_precision(precision + 16)
        self._raw = [None]          # i^{-d}, index from 1
        self._partial = [BigReal.exact(0, precision + 16)]  # sum_{j<i} j^{-d} for i = 1, 2, ...
        self._w_cache: dict[int, BigReal] = {}
        self._T_cache: dict[int, BigReal] = {}
        self._extend(2)
        self.A = Fraction(self.w(1).hi_fraction)

    def _extend(self, i: int) -> None:
        wp = self.precision + 16
        while len(self._raw) <= i:
            j = len(self._raw)
            r = BigReal.exact(Fraction(1, j ** self.d.numerator), wp) if self.d.denominator == 1 else power(BigReal.exact(j, wp), -self.d)
            self._raw.append(r)
            self._partial.append(self._partial[-1] + r)

    def w(self, i: int) -> BigReal:
        v = self._w_cache.get(i)
        if v is None:
            self._extend(i)
            v = self._w_cache[i] = (self._raw[i] / self.zeta_d).with_precision(self.precision)
        return v

    def T(self, i: int) -> BigReal:
        """Tail sum_{j >= i} w_j = 1 - (sum_{j<i} j^-d)/zeta(d)."""
        if i < 1:
            raise DomainError("branch index must be >= 1")
        if i == 1:
            return BigReal.exact(1, self.precision)
        v = self._T_cache.get(i)
        if v is None:
            self._extend(i)
            v = self._T_cache[i] = ((self.zeta_d - self._partial[i - 1]) / self.zeta_d).with_precision(self.precision)
        return v

    def tail_bounds(self, i: int) -> tuple[float, float]:
        """Integral-comparison bracket for T_i: [int_i^inf, i^-d + int_i^inf] / zeta(d)."""
        d = float(self.d)
        integral = i ** (1 - d) / (d - 1)
        z = float(self.zeta_d.center)
        return integral / z, (integral + i ** -d) / z

    def apply(self, i, x):
        x = as_real(x, self.precision)
        return self.T(i + 1) + self.w(i) * (1 - x)

    def invert(self, i, y):
        return 1 - (y - self.T(i + 1)) / self.w(i)

    def xi(self, i):
        return self.w(i)

    lam = xi

    def image(self, i):
        return self.T(i + 1), self.T(i)

    def branch_of(self, y: BigReal) -> int:
        """i with T_{i+1} < y <= T_i (certified)."""
        if not y.certainly_gt(0):
            raise AmbiguousBoundary(f"point {y!r} is not certainly positive")
        if y.certainly_gt(1):
            raise DomainError(f"point {y!r} lies above 1")
        c = y.center
        hi = 2
        while self.T(hi).center >= c:
            hi *= 2
            if hi > MAX_BRANCH:
                raise PrecisionExhausted("point too close to 0 for the branch table")
        lo = 1  # T(lo) >= c > T(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.T(mid).center >= c:
                lo = mid
            else:
                hi = mid
        if self.T(lo + 1).certainly_lt(y) and y.certainly_le(self.T(lo)):
            return lo
        raise AmbiguousBoundary(f"point {y!r} sits on a branch endpoint near T_{lo} or T_{lo + 1}")

    def with_precision(self, precision: int) -> "AffineGaussLike":
        if precision == self.precision:
            return self
        return _affine_cached(self.d, precision)

    def check_contraction(self, i_max: int) -> ConditionCheck:
        """m = 1 with A = w_1: |f_i'| = w_i <= w_1 < 1."""
        w1 = self.w(1)
        ok = w1.certainly_lt(1) and all(self.w(i).certainly_le(w1) or i == 1 for i in range(1, i_max + 1))
        return ConditionCheck("contraction (m=1)", ok, f"A = w_1 = {float(w1):.6g}")

    def check_tiling(self, i_max: int) -> ConditionCheck:
        """sum_{i<=I} w_i + T_{I+1} = 1 within enclosure radii, and T_i inside its integral bracket."""
        acc = BigReal.exact(0, self.precision)
        bad = []
        for I in range(1, i_max + 1):
            acc = acc + self.w(I)
            if not (acc + self.T(I + 1)).contains(1):
                bad.append(I)
            lo, hi = self.tail_bounds(I + 1)
            t = float(self.T(I + 1))
            if not (lo * (1 - 1e-12) <= t <= hi * (1 + 1e-12)):
                bad.append(I)
        return ConditionCheck("tiling", not bad, f"I <= {i_max}, failures at {bad[:5]}")

    def check_disjoint(self, i_max: int) -> ConditionCheck:
        # adjacent images share the exact endpoint T_{i+1}; interiors are disjoint iff every w_i > 0
        ok = all(self.w(i).certainly_gt(0) for i in range(1, i_max + 1))
        return ConditionCheck("disjoint interiors", ok and self.check_tiling(min(i_max, 1000)).passed,
                              f"{i_max} branches tile (T_{{i+1}}, T_i]")


@functools.lru_cache(maxsize=32)
def _affine_cached(d: Fraction, precision: int) -> AffineGaussLike:
    return AffineGaussLike(d, precision)


def build_affine(d, precision: int = 128) -> AffineGaussLike:
    return AffineGaussLike(d, precision)


# --------------------------------------------------------------------------
# Gauss system


class GaussSystem(DDecayingSystem):
    """f_i(x) = 1/(i + x); xi_i = (i+1)^-2, lam_i = i^-2, d = 2, m = 2, A = 1/4."""

    model = "gauss"

    def __init__(self, precision: int = 128):
        self.d = Fraction(2)
        self.m = 2
        self.A = Fraction(1, 4)
        self.precision = precision

    def apply(self, i, x):
        if isinstance(x, (int, Fraction)):
            return 1 / (i + Fraction(x))
        return 1 / (x + i)

    def invert(self, i, y):
        return 1 / y - i

    def xi(self, i):
        return BigReal.exact(Fraction(1, (i + 1) ** 2), self.precision)

    def lam(self, i):
        return BigReal.exact(Fraction(1, i * i), self.precision)

    def image(self, i):
        return BigReal.exact(Fraction(1, i + 1), self.precision), BigReal.exact(Fraction(1, i), self.precision)

    def branch_of(self, y) -> int:
        if isinstance(y, (int, Fraction)):
            y = Fraction(y)
            if not (0 < y <= 1):
                raise DomainError(f"{y} lies outside (0, 1]")
            return math.floor(1 / y)
        if not y.certainly_gt(0):
            raise AmbiguousBoundary(f"point {y!r} is not certainly positive")
        inv = 1 / y
        k = inv.floor_if_certain()
        if k is None:
            raise AmbiguousBoundary(f"point {y!r} sits on a branch endpoint 1/k")
        return k

    def with_precision(self, precision: int) -> "GaussSystem":
        return GaussSystem(precision)

    def pair_derivative(self, a: int, b: int, x: Fraction) -> Fraction:
        """|(f_a o f_b)'(x)| = 1/(a(b + x) + 1)^2, exact."""
        return Fraction(1, 1) / (a * (b + x) + 1) ** 2

    def check_contraction(self, i_max: int = 30, x_grid: int = 16) -> ConditionCheck:
        """sup over a, b <= i_max and a grid of x of the pair derivative; attained at a=b=1, x=0."""
        worst = max(self.pair_derivative(a, b, Fraction(k, x_grid))
                    for a in range(1, min(i_max, 30) + 1) for b in range(1, min(i_max, 30) + 1)
                    for k in range(x_grid + 1))
        return ConditionCheck("contraction (m=2)", worst <= self.A, f"sup = {worst} <= A = {self.A}")

    def check_decay(self, i_max: int, eps_grid) -> list[ConditionCheck]:
        out = super().check_decay(i_max, eps_grid)
        # eps = 0 with C_1 = 1/4, C_2 = 1: (i+1)^2 <= 4 i^2 and lam_i = i^-2
        ok = all((i + 1) ** 2 <= 4 * i * i for i in range(1, i_max + 1))
        out.append(ConditionCheck("2-decay at eps=0", ok, "C1 = 1/4, C2 = 1"))
        return out


def gauss_as_ddecaying(precision: int = 128) -> GaussSystem:
    return GaussSystem(precision)


def system_from_dict(d: dict) -> DDecayingSystem:
    if d["model"] == "gauss":
        return GaussSystem(int(d.get("precision", 128)))
    if d["model"] == "affine":
        return AffineGaussLike(Fraction(d["d"]), int(d.get("precision", 128)))
    raise DomainError(f"unknown system model {d['model']!r}")


# --------------------------------------------------------------------------
# projection and symbolic expansion


def project(system: DDecayingSystem, word: Sequence[int], at=1):
    """f_{a_1} o ... o f_{a_n}(at).

    ``at = 1`` is the limit-point convention; it lands on a branch endpoint at
    the last level, so roundtrips use an interior point such as 1/2.
    Exact for the Gauss system with rational ``at``.
    """
    word = list(word)
    if not word:
        raise DomainError("project needs a non-empty word")
    if min(word) < 1:
        raise DomainError("digits must be >= 1")
    at = _frac(at) if not isinstance(at, BigReal) else at
    if not (0 <= (at if not isinstance(at, BigReal) else at.center) <= 1):
        raise DomainError("evaluation point must lie in [0, 1]")
    y = at if isinstance(system, GaussSystem) and not isinstance(at, BigReal) else as_real(at, system.precision)
    for a in reversed(word):
        y = system.apply(a, y)
    return y


def symbolic_expand(system: DDecayingSystem, x, n: int, schedule=DEFAULT_SCHEDULE) -> list[int]:
    """First ``n`` symbolic digits of x in (0, 1).

    ``x`` may be exact (Fraction, Gauss system only: stops early at 0), a
    ``BigReal`` (single attempt) or a callable ``(system, precision) ->
    BigReal`` re-evaluated with a rebuilt system at each schedule step.
    Raises ``AmbiguousBoundary`` when a point cannot be separated from a
    branch endpoint.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    if callable(x):
        last = None
        for prec in schedule:
            sysp = system.with_precision(prec)
            try:
                return _expand_once(sysp, x(sysp, prec), n)
            except AmbiguousBoundary as exc:
                last = exc
        raise AmbiguousBoundary(f"still ambiguous after precision schedule: {last}")
    if isinstance(x, (int, float, str)):
        x = _frac(x)
    if isinstance(x, Fraction) and not isinstance(system, GaussSystem):
        x = BigReal.exact(x, system.precision)
    return _expand_once(system, x, n)


def _expand_once(system: DDecayingSystem, y, n: int) -> list[int]:
    digits = []
    for _ in range(n):
        if isinstance(y, Fraction) and y == 0:
            break
        i = system.branch_of(y)
        digits.append(i)
        y = system.invert(i, y)
    return digits


def roundtrip(system: DDecayingSystem, word: Sequence[int], at=Fraction(1, 2)) -> list[int]:
    """symbolic_expand(project(word, at)) with precision escalation."""
    return symbolic_expand(system, lambda s, prec: project(s, word, at), len(word))


# --------------------------------------------------------------------------
# predicted dimension


@dataclass
class Prediction:
    d: Fraction
    growth: GrowthFunction
    value: Fraction
    profile: list | None = None
    n_max: int = 0

    @property
    def profile_end(self):
        return None if not self.profile else self.profile[-1]


def predicted_dimension(d, growth: GrowthFunction, n_max: int = 1000) -> Prediction:
    """Dimension of E_d(phi): 1 for exp(n^g) with g < 1/d, 1/d for g > 1/d, 1/(g + d - 1) for exp(g^n).

    The local-dimension profile with exponent d is attached where it tends
    to the predicted value.
    """
    d = _frac(d)
    if d <= 1:
        raise DomainError("d must exceed 1")
    fam, g = growth.family, growth.param
    if fam == "exp-power":
        if g < 1 / d:
            return Prediction(d, growth, Fraction(1))
        if g == 1 / d and d != 2:
            raise Unsupported(f"gamma = 1/d is not covered for d = {d}")
        prof = _profile("power", g, d, n_max)
        return Prediction(d, growth, 1 / d, prof, n_max)
    if fam == "exp-geom":
        prof = _profile("geometric", g, d, n_max)
        return Prediction(d, growth, 1 / (g + d - 1), prof, n_max)
    raise Unsupported(f"no dimension formula for growth family {fam!r}")


def _profile(tag, g, d, n_max):
    if d.denominator != 1:
        return None
    return local_dimension_profile(ProfileQuery(tag, g, int(d), n_max))
