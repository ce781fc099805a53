"""Dimension lab: cover-sum products, the s_L equation, local-dimension profiles,
finite-depth dimension estimates and the piecewise dimension table.

Verdicts from finite products are heuristics (a window rule on the last 20%
of terms), not certificates.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath

from .cf import cylinder_length
from .compositions import generalized_bound_constant
from .constructions import WindowSpec, digit_window
from .errors import DomainError, NoRoot, PrecisionExhausted, Unsupported
from .numerics import BigReal, as_real, zeta

SCHEMES = ("power", "square", "largest")
E_THRESHOLD = (math.e - 1) / (math.e + 1)


def _frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


# --------------------------------------------------------------------------
# cover sums


@dataclass(frozen=True)
class CoverScheme:
    """Cover of the exceptional set at depths n_k.

    ``power``    n_k = round(k^{1/gamma})
    ``square``   n_k = k^2 / L^2 (gamma = 1/2 case, real-valued increments)
    ``largest``  n_k = round(k^{1/gamma} (log k)^{1/gamma^2}) (largest-quotient sets)
    """

    scheme: str
    gamma: Fraction
    s: Fraction
    k_max: int
    eps: Fraction = Fraction(1, 10)
    L: Fraction | None = None

    def __post_init__(self):
        for name in ("gamma", "s", "eps"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.L is not None:
            object.__setattr__(self, "L", _frac(self.L))
        if self.scheme not in SCHEMES:
            raise DomainError(f"scheme must be one of {SCHEMES}")
        if not (Fraction(1, 2) < self.s < 1):
            raise DomainError(f"s must lie in (1/2, 1), got {self.s}")
        if not (0 < self.eps < E_THRESHOLD):
            raise DomainError(f"eps must lie in (0, (e-1)/(e+1)) so that r2 > 0, got {self.eps}")
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")
        if self.k_max < 1:
            raise DomainError("k_max must be >= 1")
        if self.scheme == "square" and (self.L is None or self.L <= 0):
            raise DomainError("the square scheme needs L > 0")

    def depths(self) -> list[int]:
        """Rounded, strictly increasing n_1..n_K (duplicates skipped; power/largest only)."""
        out = []
        g = float(self.gamma)
        for k in range(1, self.k_max + 1):
            if self.scheme == "power":
                n = round(k ** (1 / g))
            else:
                n = round(k ** (1 / g) * math.log(k) ** (1 / g**2)) if k > 1 else 1
            if not out or n > out[-1]:
                out.append(n)
        return out

    def to_dict(self) -> dict:
        d = {"scheme": self.scheme, "gamma": str(self.gamma), "s": str(self.s), "k_max": self.k_max,
             "eps": str(self.eps)}
        if self.L is not None:
            d["L"] = str(self.L)
        return d


@dataclass
class CoverSumReport:
    scheme: CoverScheme
    increments: list[float]       # log of the l-th factor
    log_product: list[float]      # running sum
    verdict: str                  # bounded-trend / diverging-trend
    crossover: float | None       # first l after which the main-term estimate is negative

    def rows(self):
        for l, (inc, tot) in enumerate(zip(self.increments, self.log_product), 1):
            yield l, inc, tot


def cover_sum_terms(scheme: CoverScheme, precision: int = 64) -> CoverSumReport:
    """Per-l log factors of the product bound on sum |I_{n_k}|^s.

    power:   log(r_1 e^l C^{D_l} r_2^{2s} e^{-2sl}),  D_l = n_l - n_{l-1}
    square:  log(r_1 r_2^{2s} C^{D_l} e^{(1-2s)l/L}),  D_l = (l^2 - (l-1)^2)/L^2
    largest: log(3/2 l^{1/g} (log l)^{1/g^2} e^{u_l} C^{D_l} 2^{2s} e^{-2s u_l}),  u_l = l (log l)^{1/g}

    with C = (9/2)(2 + zeta(2s)), r_1 = 2 eps (1 - 1/e), r_2 = (e - 1 - eps e - eps)/e.
    The verdict is bounded-trend iff the last 20% of increments are all negative.
    """
    s = scheme.s
    wp = precision
    logC = generalized_bound_constant(2 * s, wp).log()
    e = BigReal.exact(1, wp).exp()
    r1 = (1 - 1 / e) * (2 * scheme.eps)
    r2 = (e - 1 - e * scheme.eps - scheme.eps) / e
    base = r1.log() + r2.log() * (2 * s)
    incs = []
    if scheme.scheme == "power":
        prev = 0
        for l, n in enumerate(scheme.depths(), 1):
            inc = base + BigReal.exact((1 - 2 * s) * l, wp) + logC * (n - prev)
            prev = n
            incs.append(float(inc.center))
    elif scheme.scheme == "square":
        L = scheme.L
        for l in range(1, scheme.k_max + 1):
            inc = base + logC * Fraction(2 * l - 1, 1) / (L * L) + BigReal.exact((1 - 2 * s) * l / L, wp)
            incs.append(float(inc.center))
    else:
        g = scheme.gamma
        prev = 0
        c0 = math.log(1.5) + 2 * float(s) * math.log(2)
        for l, n in enumerate(scheme.depths(), 1):
            ll = math.log(l) if l > 1 else 0.0
            u = l * ll ** (1 / float(g))
            head = c0 + (math.log(l) / float(g)) + (math.log(ll) / float(g) ** 2 if ll > 0 else 0.0)
            incs.append(head + (1 - 2 * float(s)) * u + float(logC.center) * (n - prev))
            prev = n
    tail = incs[len(incs) - max(1, len(incs) // 5):]
    verdict = "bounded-trend" if all(x < 0 for x in tail) else "diverging-trend"
    totals = []
    acc = 0.0
    for x in incs:
        acc += x
        totals.append(acc)
    return CoverSumReport(scheme, incs, totals, verdict, _crossover(scheme, float(logC.center)))


def _crossover(scheme: CoverScheme, logC: float) -> float | None:
    """Where (2s-1) l overtakes logC * D_l for the power scheme, D_l ~ l^{1/g-1}/g."""
    if scheme.scheme != "power":
        return None
    g, s = float(scheme.gamma), float(scheme.s)
    expo = 1 / g - 1
    if expo >= 1:
        return None
    if expo <= 0:
        return 1.0
    # (2s-1) l = logC/g * l^expo
    return (logC / g / (2 * s - 1)) ** (1 / (1 - expo))


# --------------------------------------------------------------------------
# s_L


@dataclass(frozen=True)
class SLRoot:
    L: Fraction
    lo: Fraction
    hi: Fraction

    @property
    def value(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def _f_sL(s: Fraction, L: Fraction, prec: int) -> BigReal:
    return generalized_bound_constant(2 * s, prec).log() - BigReal.exact((2 * s - 1) * L / 2, prec)


def _sign_f(s, L, schedule=(64, 128, 256, 512)) -> tuple[int, BigReal]:
    last = None
    for prec in schedule:
        last = _f_sL(s, L, prec)
        sg = last.sign()
        if sg is not None:
            return sg, last
    return 0, last


def solve_sL(L, precision: int = 32, delta: Fraction = Fraction(1, 2**24)) -> SLRoot:
    """Root s_L in (1/2, 1) of log((9/2)(2 + zeta(2s))) = (2s - 1) L / 2.

    f is strictly decreasing (both terms are), so a root exists iff
    f(1 - delta) < 0.  Bisection keeps a certified sign-change bracket of
    width <= 2^-precision; if f(mid) cannot be separated from 0, the root is
    within radius(f(mid))/L of mid (|f'| >= L), which closes the bracket.
    """
    L = _frac(L)
    if L <= 0:
        raise DomainError("L must be positive")
    lo, hi = Fraction(1, 2) + delta, 1 - delta
    s_lo, _ = _sign_f(lo, L)
    s_hi, _ = _sign_f(hi, L)
    if not (s_lo > 0 and s_hi < 0):
        raise NoRoot(f"no sign change of f on (1/2 + delta, 1 - delta) for L = {L}; L is below threshold")
    target = Fraction(1, 2**precision)
    while hi - lo > target:
        mid = (lo + hi) / 2
        sg, val = _sign_f(mid, L)
        if sg > 0:
            lo = mid
        elif sg < 0:
            hi = mid
        else:
            r = val.hi_fraction - val.lo_fraction
            return SLRoot(L, max(lo, mid - r / L), min(hi, mid + r / L))
    return SLRoot(L, lo, hi)


# --------------------------------------------------------------------------
# local dimension profile


GROWTH_TAGS = ("power", "geometric", "exponential")


@dataclass(frozen=True)
class ProfileQuery:
    """L(j) = j^gamma (power), gamma^j (geometric) or e^{gamma j} (exponential)."""

    growth: str
    gamma: Fraction
    d: int = 2
    n_max: int = 100

    def __post_init__(self):
        object.__setattr__(self, "gamma", _frac(self.gamma))
        if self.growth not in GROWTH_TAGS:
            raise DomainError(f"growth must be one of {GROWTH_TAGS}")
        if self.gamma <= 0 or (self.growth == "geometric" and self.gamma <= 1):
            raise DomainError("L(j) must be positive and increasing")
        if self.d < 1 or self.n_max < 1:
            raise DomainError("need d >= 1 and n_max >= 1")

    def exact(self) -> bool:
        return self.gamma.denominator == 1 and self.growth in ("power", "geometric")


def local_dimension_profile(q: ProfileQuery, precision: int = 64) -> list:
    """rho(n) = sum_{j<n} L(j) / (d sum_{j<=n} L(j) - (d-1) L(n)) for n = 1..n_max.

    Exact Fractions when L takes integer values, otherwise mpf at ``precision`` bits.
    """
    d = q.d
    out = []
    if q.exact():
        g = int(q.gamma)
        L = (lambda j: j**g) if q.growth == "power" else (lambda j: g**j)
        total = 0
        for n in range(1, q.n_max + 1):
            ln = L(n)
            total += ln
            out.append(Fraction(total - ln, d * total - (d - 1) * ln))
        return out
    ctx = mpmath.mp.clone()
    ctx.prec = precision
    g = ctx.mpf(q.gamma.numerator) / q.gamma.denominator
    if q.growth == "power":
        L = lambda j: ctx.power(j, g)
    elif q.growth == "geometric":
        L = lambda j: ctx.power(g, j)
    else:
        L = lambda j: ctx.exp(g * j)
    total = ctx.mpf(0)
    for n in range(1, q.n_max + 1):
        ln = L(n)
        total += ln
        out.append((total - ln) / (d * total - (d - 1) * ln))
    return out


def profile_limit(growth: str, gamma, d: int = 2) -> Fraction:
    """n -> infinity limit of rho: 1/d for power growth, 1/(gamma + d - 1) for geometric."""
    gamma = _frac(gamma)
    if growth == "power":
        return Fraction(1, d)
    if growth == "geometric":
        return 1 / (gamma + d - 1)
    raise Unsupported(f"no closed-form limit for {growth} growth")


# --------------------------------------------------------------------------
# finite-depth estimate


@dataclass
class DepthEstimate:
    depth: int
    log_count: float
    log_inv_length: float
    typical: str

    @property
    def estimate(self) -> float:
        return self.log_count / self.log_inv_length


def finite_depth_dimension(spec: WindowSpec, depth: int, typical: str = "midpoint", samples: int = 32,
                           seed: int = 0) -> DepthEstimate:
    """log #(depth-n cylinders) / -log |typical cylinder|.

    Counts are exact window sizes (one digit, a_j = 1, before the window
    start).  ``typical='midpoint'`` measures the cylinder of midpoint
    digits; ``'geomean'`` averages -log|I| over ``samples`` random words.
    """
    if depth < 1:
        raise DomainError("depth must be >= 1")
    windows = [digit_window(spec, n) if n >= spec.start else range(1, 2) for n in range(1, depth + 1)]
    log_count = sum(math.log(w.stop - w.start) for w in windows)
    if typical == "midpoint":
        word = [(w.start + w.stop - 1) // 2 for w in windows]
        inv = _log_inv_length(word)
    elif typical == "geomean":
        rng = random.Random(seed)
        inv = sum(_log_inv_length([rng.randrange(w.start, w.stop) for w in windows]) for _ in range(samples)) / samples
    else:
        raise DomainError("typical must be 'midpoint' or 'geomean'")
    return DepthEstimate(depth, log_count, inv, typical)


def _log_inv_length(word: Sequence[int]) -> float:
    length = cylinder_length(word)
    return math.log(length.denominator) - math.log(length.numerator)


# --------------------------------------------------------------------------
# dimension table


FIGURE_FAMILIES = ("exp-power", "poly", "exp-geom")


@dataclass(frozen=True)
class FigureRow:
    gamma: Fraction
    family: str
    dim: Fraction
    note: str = ""


def parse_grid(text: str) -> list[Fraction]:
    """``start:stop:step`` (inclusive, exact decimal arithmetic) or comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"grid {text!r} must be start:stop:step")
        a, b, h = (Fraction(p) for p in parts)
        if h <= 0:
            raise DomainError("grid step must be positive")
        out = []
        x = a
        while x <= b:
            out.append(x)
            x += h
        return out
    return [Fraction(p) for p in text.split(",") if p.strip()]


def closed_form_dimension(family: str, gamma) -> Fraction:
    """dim_H E_phi for phi = exp(n^g), n^g (g > 1) and exp(g^n) (g > 1)."""
    gamma = _frac(gamma)
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if family == "exp-power":
        return Fraction(1) if gamma < Fraction(1, 2) else Fraction(1, 2)
    if family == "poly":
        if gamma <= 1:
            raise Unsupported("polynomial growth is covered only for gamma > 1")
        return Fraction(1)
    if family == "exp-geom":
        if gamma <= 1:
            raise Unsupported("exp(gamma^n) is covered only for gamma > 1")
        return 1 / (gamma + 1)
    raise Unsupported(f"unknown family {family!r}")


def figure1_data(grid: Sequence, families: Sequence[str] = ("exp-power",)) -> list[FigureRow]:
    """Closed-form dimensions on a gamma grid; rows outside a family's range are omitted."""
    rows = []
    for fam in families:
        if fam not in FIGURE_FAMILIES:
            raise DomainError(f"family must be among {FIGURE_FAMILIES}")
        for g in grid:
            g = _frac(g)
            if g <= 0:
                raise DomainError("grid values must be positive")
            try:
                dim = closed_form_dimension(fam, g)
            except Unsupported:
                continue
            note = "jump" if fam == "exp-power" and g == Fraction(1, 2) else ""
            rows.append(FigureRow(g, fam, dim, note))
    return rows
