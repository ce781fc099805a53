"""Digit-stream constructions of the exceptional sets.

* A / B: a_n strictly inside (c_1(n) e^{n^gamma}, c_2(n) e^{n^gamma}) for n >= N.
* F(gamma, alpha): the B-window with c_1(n) = alpha (1 - 1/n), c_2 = alpha.
* E_M(phi): prescribed large digits at sparse indices n_k, fillers in 1..M elsewhere.
* mu: the uniform measure on an A-set, digits drawn independently per window.

Every window endpoint is decided with certified floors, so produced digits
satisfy the strict window inequalities exactly.
"""

from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .errors import DomainError, EmptyWindow
from .numerics import (
    DEFAULT_SCHEDULE,
    BigReal,
    GrowthFunction,
    as_real,
    certified_ceil,
    certified_floor,
    certified_sign,
    magnitude_schedule,
    power,
    psi_value,
)

WINDOW_FAMILIES = ("const", "telescoping", "largest", "expgap")
POLICIES = ("min", "mid", "random")


def _frac(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class WindowSpec:
    """Admissible digits at index n: integers in (c_1(n) e^{n^gamma}, c_2(n) e^{n^gamma}).

    Families (``params`` keys in brackets):

    ``const``    c_1, c_2 constants                       [c1, c2]
    ``telescoping``  c_1 = 1 - e^{(n-1)^g - n^g}, c_2 = (n+1)/n c_1
    ``largest``  c_1 = alpha (1 - 1/n), c_2 = alpha       [alpha]
    ``expgap``   c_1 = c, c_2 = c + e^{-rate n}           [c, rate]
    """

    family: str
    gamma: Fraction
    params: tuple = ()
    start: int = 1

    def __post_init__(self):
        if self.family not in WINDOW_FAMILIES:
            raise DomainError(f"unknown window family {self.family!r}")
        object.__setattr__(self, "gamma", _frac(self.gamma))
        object.__setattr__(self, "params", tuple(sorted((k, _frac(v)) for k, v in dict(self.params).items())))
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")
        if self.start < 1:
            raise DomainError("window start must be >= 1")
        p = self.p
        if self.family == "const" and not (0 < p["c1"] < p["c2"]):
            raise DomainError("need 0 < c1 < c2")
        if self.family == "largest" and p["alpha"] <= 0:
            raise DomainError("alpha must be positive")
        if self.family == "expgap" and (p["c"] <= 0 or p["rate"] <= 0):
            raise DomainError("need c > 0 and rate > 0")

    @property
    def p(self) -> dict:
        return dict(self.params)

    # convenience constructors
    @classmethod
    def constant(cls, gamma, c1, c2, start: int = 1) -> "WindowSpec":
        return cls("const", gamma, {"c1": c1, "c2": c2}, start)

    @classmethod
    def telescoping(cls, gamma, start: int | None = None, horizon: int = 2000) -> "WindowSpec":
        spec = cls("telescoping", gamma, {}, 1)
        return spec.with_start(n_one(spec, horizon) if start is None else start)

    @classmethod
    def largest(cls, gamma, alpha=1, start: int | None = None) -> "WindowSpec":
        spec = cls("largest", gamma, {"alpha": alpha}, 1)
        if start is None:
            start = _least_n(lambda n, prec: (as_real(spec.p["alpha"], prec) / n) * _e_pow(n, spec.gamma, prec) - 1)
        return spec.with_start(start)

    def with_start(self, start: int) -> "WindowSpec":
        return WindowSpec(self.family, self.gamma, dict(self.params), start)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "gamma": str(self.gamma),
            "params": {k: str(v) for k, v in self.params},
            "start": self.start,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WindowSpec":
        return cls(d["family"], Fraction(d["gamma"]), {k: Fraction(v) for k, v in d.get("params", {}).items()},
                   int(d.get("start", 1)))

    # window functions
    def c1(self, n: int, prec: int) -> BigReal:
        f, p = self.family, self.p
        if f == "const":
            return as_real(p["c1"], prec)
        if f == "telescoping":
            return 1 - (_n_pow(n - 1, self.gamma, prec) - _n_pow(n, self.gamma, prec)).exp()
        if f == "largest":
            return BigReal.exact(p["alpha"] * (1 - Fraction(1, n)), prec)
        return as_real(p["c"], prec)

    def c2(self, n: int, prec: int) -> BigReal:
        f, p = self.family, self.p
        if f == "const":
            return as_real(p["c2"], prec)
        if f == "telescoping":
            return self.c1(n, prec) * Fraction(n + 1, n)
        if f == "largest":
            return as_real(p["alpha"], prec)
        return as_real(p["c"], prec) + BigReal.exact(-p["rate"] * n, prec).exp()

    def lower_end(self, n: int, prec: int) -> BigReal:
        if self.family == "telescoping":
            return _e_pow(n, self.gamma, prec) - _e_pow(n - 1, self.gamma, prec)
        return self.c1(n, prec) * _e_pow(n, self.gamma, prec)

    def upper_end(self, n: int, prec: int) -> BigReal:
        if self.family == "telescoping":
            return self.lower_end(n, prec) * Fraction(n + 1, n)
        return self.c2(n, prec) * _e_pow(n, self.gamma, prec)

    def gap(self, n: int, prec: int) -> BigReal:
        """c_2(n) - c_1(n), formed without cancellation."""
        f, p = self.family, self.p
        if f == "const":
            return BigReal.exact(p["c2"] - p["c1"], prec)
        if f == "telescoping":
            return self.c1(n, prec) / n
        if f == "largest":
            return BigReal.exact(p["alpha"] / n, prec)
        return BigReal.exact(-p["rate"] * n, prec).exp()

    def width(self, n: int, prec: int) -> BigReal:
        """(c_2(n) - c_1(n)) e^{n^gamma}."""
        if self.family == "telescoping":
            return self.lower_end(n, prec) / n
        return self.gap(n, prec) * _e_pow(n, self.gamma, prec)

    def schedule(self, n: int) -> list[int]:
        return magnitude_schedule(float(n) ** float(self.gamma) / math.log(2) + 8, DEFAULT_SCHEDULE)

    def contains_digit(self, n: int, a: int) -> bool:
        """Certified test of c_1(n) < a e^{-n^gamma} < c_2(n)."""
        lo = certified_sign(lambda prec: a - self.lower_end(n, prec), self.schedule(n))
        hi = certified_sign(lambda prec: self.upper_end(n, prec) - a, self.schedule(n))
        return lo > 0 and hi > 0


def _n_pow(n: int, gamma: Fraction, prec: int) -> BigReal:
    if n == 0:
        return BigReal.exact(0, prec)
    return power(BigReal.exact(n, prec), gamma)


def _e_pow(n: int, gamma: Fraction, prec: int) -> BigReal:
    """e^{n^gamma}."""
    return _n_pow(n, gamma, prec).exp()


def _least_n(fn: Callable[[int, int], BigReal], limit: int = 10**7) -> int:
    """Least n >= 1 with fn(n) > 0, assuming fn is eventually and monotonically positive."""
    def positive(n):
        return certified_sign(lambda prec: fn(n, prec)) > 0

    if positive(1):
        return 1
    hi = 2
    while not positive(hi):
        hi *= 2
        if hi > limit:
            raise DomainError("no admissible index below search limit")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if positive(mid):
            hi = mid
        else:
            lo = mid
    return hi


def n_zero(gamma, c1, c2) -> int:
    """Smallest n with (c_2 - c_1) e^{n^gamma} > 1."""
    gamma, c1, c2 = _frac(gamma), _frac(c1), _frac(c2)
    if not (0 < c1 < c2) or gamma <= 0:
        raise DomainError("need 0 < c1 < c2 and gamma > 0")
    return _least_n(lambda n, prec: (c2 - c1) * _e_pow(n, gamma, prec) - 1)


def n_one(spec: WindowSpec, horizon: int = 2000) -> int:
    """Smallest N with (c_2(n) - c_1(n)) e^{n^gamma} > 1 for every N <= n <= horizon."""
    last_bad = 0
    for n in range(1, horizon + 1):
        if certified_sign(lambda prec: spec.width(n, prec) - 1, spec.schedule(n)) <= 0:
            last_bad = n
    return last_bad + 1


def digit_window(spec: WindowSpec, n: int) -> range:
    """Integers strictly inside (c_1(n) e^{n^gamma}, c_2(n) e^{n^gamma})."""
    if n < 1:
        raise DomainError("window index must be >= 1")
    sched = spec.schedule(n)
    lo = certified_floor(lambda prec: spec.lower_end(n, prec), sched) + 1
    hi = certified_ceil(lambda prec: spec.upper_end(n, prec), sched) - 1
    if hi < lo:
        raise EmptyWindow(n)
    return range(lo, hi + 1)


# --------------------------------------------------------------------------
# window assumption checks (heuristic trends)


@dataclass
class TrendCheck:
    name: str
    rule: str
    values: list[tuple[int, float]]
    passed: bool


@dataclass
class AssumptionReport:
    spec: WindowSpec
    horizon: int
    checks: list[TrendCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def check_B_assumptions(spec: WindowSpec, horizon: int = 1000, prec: int = 128) -> AssumptionReport:
    """Evaluate the three limit conditions on the window functions up to ``horizon``.

    Finite-horizon heuristics: (1) |log(c_2-c_1)/n^gamma| decreases over the
    last doubling or is zero; (2) log c_1/log n does not drift further down
    over the last doubling than over the one before; (3) likewise upward for
    log c_2/log n.
    """
    if horizon < 10:
        raise DomainError("horizon must be >= 10")
    grid = sorted({n for n in _log_grid(2, horizon)} | {horizon // 4, horizon // 2, horizon})
    v1, v2, v3 = [], [], []
    for n in grid:
        c1 = spec.c1(n, prec)
        c2 = spec.c2(n, prec)
        diff = spec.gap(n, prec)
        ng = _n_pow(n, spec.gamma, prec)
        logn = BigReal.exact(n, prec).log()
        v1.append((n, float(diff.log() / ng)))
        v2.append((n, float(c1.log() / logn)))
        v3.append((n, float(c2.log() / logn)))

    def at(vals, n):
        return dict(vals)[n]

    h, h2, h4 = horizon, horizon // 2, horizon // 4
    a = abs(at(v1, h))
    ok1 = a < 1e-12 or a < abs(at(v1, h2))
    drift_lo = min(v for n, v in v2 if n >= h2) - min(v for n, v in v2 if h4 <= n <= h2)
    drift_lo_prev = min(v for n, v in v2 if h4 <= n <= h2) - min(v for n, v in v2 if n <= h4)
    ok2 = drift_lo >= min(0.0, drift_lo_prev) - 1e-9 or drift_lo > -0.05
    drift_hi = max(v for n, v in v3 if n >= h2) - max(v for n, v in v3 if h4 <= n <= h2)
    drift_hi_prev = max(v for n, v in v3 if h4 <= n <= h2) - max(v for n, v in v3 if n <= h4)
    ok3 = drift_hi <= max(0.0, drift_hi_prev) + 1e-9 or drift_hi < 0.05
    checks = [
        TrendCheck("log(c2-c1)/n^gamma -> 0", "|value| shrinks over the last doubling", v1, ok1),
        TrendCheck("liminf log c1/log n > -inf", "downward drift not accelerating", v2, ok2),
        TrendCheck("limsup log c2/log n < +inf", "upward drift not accelerating", v3, ok3),
    ]
    return AssumptionReport(spec, horizon, checks)


def _log_grid(a: int, b: int, per_decade: int = 12) -> list[int]:
    out = set()
    x = float(a)
    step = 10 ** (1 / per_decade)
    while x <= b:
        out.add(int(round(x)))
        x *= step
    return sorted(out)


# --------------------------------------------------------------------------
# streams


class DigitStream:
    """Lazily generated partial quotients with provenance.

    Iterating consumes the stream; ``clone()`` replays from the same
    parameters (and seed) to the current position.
    """

    def __init__(self, provenance: str, params: dict, factory: Callable[[], Iterator[int]]):
        self.provenance = provenance
        self.params = params
        self._factory = factory
        self._gen = factory()
        self.position = 0

    def __iter__(self):
        return self

    def __next__(self) -> int:
        d = next(self._gen)
        self.position += 1
        return d

    def take(self, n: int) -> list[int]:
        return [next(self) for _ in range(n)]

    def clone(self) -> "DigitStream":
        other = type(self).__new__(type(self))
        other.__dict__.update(self.__dict__)
        other._gen = self._factory()
        other.position = 0
        for _ in range(self.position):
            next(other)
        return other

    def fresh(self) -> "DigitStream":
        other = self.clone()
        other._gen = self._factory()
        other.position = 0
        return other

    def to_json(self) -> str:
        return json.dumps({"provenance": self.provenance, **self.params}, sort_keys=True, separators=(",", ":"))


def _pick(window: range, policy: str, rng: random.Random) -> int:
    if policy == "min":
        return window.start
    if policy == "mid":
        return (window.start + window.stop - 1) // 2
    return rng.randrange(window.start, window.stop)


def stream_B(spec: WindowSpec, policy: str = "min", seed: int = 0, provenance: str = "B") -> DigitStream:
    """One admissible digit per index n >= spec.start; digits before the start are 1."""
    if policy not in POLICIES:
        raise DomainError(f"policy must be one of {POLICIES}")

    def factory():
        rng = random.Random(seed)
        n = 0
        while True:
            n += 1
            if n < spec.start:
                yield 1
            else:
                yield _pick(digit_window(spec, n), policy, rng)

    params = {"window": spec.to_dict(), "policy": policy, "seed": seed}
    return DigitStream(provenance, params, factory)


def stream_A(gamma, c1, c2, start: int | None = None, policy: str = "min", seed: int = 0) -> DigitStream:
    if start is None:
        start = n_zero(gamma, c1, c2)
    return stream_B(WindowSpec.constant(gamma, c1, c2, start), policy, seed, provenance="A")


def stream_F(gamma, alpha=1, policy: str = "min", seed: int = 0) -> DigitStream:
    """Points of B(gamma, alpha(1-1/n), alpha, N_1), which lie in F(gamma, alpha)."""
    return stream_B(WindowSpec.largest(gamma, alpha), policy, seed, provenance="F")


def sample_mu(gamma, c1, c2, N: int, depth: int, seed: int = 0) -> list[int]:
    """First ``depth`` digits of a mu-random point: a_n uniform on its window for n >= N."""
    spec = WindowSpec.constant(gamma, c1, c2, N)
    return stream_B(spec, "random", seed, provenance="mu").take(depth)


# --------------------------------------------------------------------------
# E_M(phi)


@dataclass(frozen=True)
class EMSpec:
    phi: GrowthFunction
    psi: str = "invlog"
    M: int = 2
    filler: str = "cycle"
    seed: int = 0

    def __post_init__(self):
        if self.M < 1:
            raise DomainError("filler bound M must be >= 1")
        if self.filler not in ("cycle", "random"):
            raise DomainError("filler policy must be 'cycle' or 'random'")

    def to_dict(self) -> dict:
        return {"phi": str(self.phi), "psi": self.psi, "M": self.M, "filler": self.filler, "seed": self.seed}

    @classmethod
    def from_dict(cls, d: dict) -> "EMSpec":
        return cls(GrowthFunction.parse(d["phi"]), d.get("psi", "invlog"), int(d.get("M", 2)),
                   d.get("filler", "cycle"), int(d.get("seed", 0)))


class EMStream(DigitStream):
    """Digits of E_M(phi) plus the index map n_k and the floors behind a_{n_k}.

    ``indices[k-1] = n_k``, ``floors[k-1] = floor((1 + eps_k) phi(n_k))``,
    ``big_digits[k-1] = a_{n_k}``.
    """

    def __init__(self, spec: EMSpec):
        self.spec = spec
        self.indices: list[int] = []
        self.floors: list[int] = []
        self.big_digits: list[int] = []
        super().__init__("EM", spec.to_dict(), self._generate)

    def _eps(self, k: int, prec: int) -> BigReal:
        e = psi_value(self.spec.psi, k, prec)
        if not e.certainly_gt(0):
            raise DomainError(f"psi({k}) must be positive")
        return e

    def _generate(self) -> Iterator[int]:
        self.indices, self.floors, self.big_digits = [], [], []
        phi = self.spec.phi
        rng = random.Random(self.spec.seed)
        fill = 0
        # n_1: least n with phi(n) >= 1; later: least n with phi(n) >= (1 + eps_{k-1}) phi(n_{k-1})
        target = None  # callable prec -> log of the threshold
        n = 0
        while True:
            n += 1
            if target is None:
                hit = certified_sign(lambda prec: phi.value(n, prec) - 1) >= 0
            else:
                hit = certified_sign(lambda prec: phi.log_value(n, prec) - target(prec)) >= 0
            if hit:
                k = len(self.indices) + 1
                sched = magnitude_schedule(phi.magnitude_bits(n) + 4)
                fl = certified_floor(lambda prec: (1 + self._eps(k, prec)) * phi.value(n, prec), sched)
                prev = self.floors[-1] if self.floors else 0
                digit = fl - prev + 1
                self.indices.append(n)
                self.floors.append(fl)
                self.big_digits.append(digit)
                nk, kk = n, k
                target = lambda prec, nk=nk, kk=kk: (1 + self._eps(kk, prec)).log() + phi.log_value(nk, prec)
                yield digit
            else:
                if self.spec.filler == "cycle":
                    yield fill % self.spec.M + 1
                    fill += 1
                else:
                    yield rng.randint(1, self.spec.M)

    def clone(self) -> "EMStream":
        other = EMStream(self.spec)
        for _ in range(self.position):
            next(other)
        return other

    def verify_indices(self) -> list[int]:
        """k where phi(n_k) >= (1 + eps_{k-1}) phi(n_{k-1}) or minimality of n_k fails (certified)."""
        phi = self.spec.phi
        bad = []
        for k, nk in enumerate(self.indices, 1):
            if k == 1:
                def excess(n, prec):
                    return phi.value(n, prec) - 1
                lower = 1
            else:
                prev = self.indices[k - 2]

                def excess(n, prec, prev=prev, k=k):
                    return phi.log_value(n, prec) - (1 + self._eps(k - 1, prec)).log() - phi.log_value(prev, prec)
                lower = prev + 1
            if certified_sign(lambda prec: excess(nk, prec)) < 0:
                bad.append(k)
            elif nk - 1 >= lower and certified_sign(lambda prec: excess(nk - 1, prec)) >= 0:
                bad.append(k)
        return bad

    def r(self, n: int) -> int:
        """max{k : n_k <= n} (0 if none); the stream must have reached position n."""
        if n > self.position:
            raise DomainError(f"stream only advanced to {self.position} < {n}")
        return bisect.bisect_right(self.indices, n)

    def lipschitz_diagnostics(self, n: int) -> dict:
        """r(n)/n and log(a_{n_1} ... a_{n_r(n)})/n at depth n."""
        r = self.r(n)
        log_prod = sum(math.log(a) for a in self.big_digits[:r])
        return {"n": n, "r": r, "r_over_n": r / n, "log_product_over_n": log_prod / n}


def stream_EM(spec: EMSpec) -> EMStream:
    return EMStream(spec)


# --------------------------------------------------------------------------
# diagnostics


@dataclass
class DiagnosticRow:
    n: int
    S: int
    T: int
    s_ratio: BigReal
    t_ratio: BigReal | None


def membership_diagnostics(digits, phi: GrowthFunction, gamma_T=None, depths: Sequence[int] = (),
                           precision: int = 64) -> list[DiagnosticRow]:
    """S_n/phi(n) and T_n/e^{n^gamma} at each depth (certified ratios).

    ``digits`` is a ``DigitStream`` (read from a fresh replay, not consumed)
    or a digit sequence at least ``max(depths)`` long.
    """
    depths = list(depths)
    if depths != sorted(depths) or not depths:
        raise DomainError("depths must be a non-empty increasing list")
    if isinstance(digits, DigitStream):
        digits = digits.fresh().take(depths[-1])
    if len(digits) < depths[-1]:
        raise DomainError("not enough digits for the requested depths")
    rows = []
    s = t = 0
    it = iter(depths)
    want = next(it)
    for n, a in enumerate(digits, 1):
        s += a
        t = max(t, a)
        if n == want:
            wp = precision + int(phi.magnitude_bits(n)) + 16
            s_ratio = BigReal.exact(s, wp) / phi.value(n, wp)
            t_ratio = None
            if gamma_T is not None:
                t_ratio = BigReal.exact(t, wp) / _e_pow(n, _frac(gamma_T), wp + int(n ** float(gamma_T)))
            rows.append(DiagnosticRow(n, s, t, s_ratio.with_precision(precision),
                                      None if t_ratio is None else t_ratio.with_precision(precision)))
            want = next(it, None)
            if want is None:
                break
    return rows


def largest_sandwich_failures(digits: Sequence[int], gamma, alpha, start: int) -> list[int]:
    """Indices n >= start where alpha(1-1/n) <= T_n/e^{n^gamma} <= alpha fails (certified)."""
    gamma, alpha = _frac(gamma), _frac(alpha)
    bad = []
    t = 0
    for n, a in enumerate(digits, 1):
        t = max(t, a)
        if n < start:
            continue
        sched = magnitude_schedule(float(n) ** float(gamma) / math.log(2) + 8)
        lower_ok = certified_sign(lambda prec: t - alpha * (1 - Fraction(1, n)) * _e_pow(n, gamma, prec), sched)
        upper_ok = certified_sign(lambda prec: alpha * _e_pow(n, gamma, prec) - t, sched)
        if lower_ok < 0 or upper_ok < 0:
            bad.append(n)
    return bad


def stream_from_json(text: str) -> DigitStream:
    """Rebuild a stream from ``DigitStream.to_json`` output."""
    d = json.loads(text)
    prov = d.pop("provenance")
    if prov == "EM":
        return stream_EM(EMSpec.from_dict(d))
    spec = WindowSpec.from_dict(d["window"])
    return stream_B(spec, d["policy"], int(d["seed"]), provenance=prov)
