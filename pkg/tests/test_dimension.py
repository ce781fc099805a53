import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from cfdim.constructions import WindowSpec
from cfdim.dimension import (
    CoverScheme,
    closed_form_dimension,
    ProfileQuery,
    cover_sum_terms,
    figure1_data,
    finite_depth_dimension,
    local_dimension_profile,
    parse_grid,
    profile_limit,
    solve_sL,
)
from cfdim.errors import DomainError, NoRoot, Unsupported


# ---- cover sums

def _power_increment(gamma, s, eps, l, D):
    # straight mpmath transcription of the per-depth factor
    with mpmath.workdps(30):
        s, eps = mpmath.mpf(s), mpmath.mpf(eps)
        e = mpmath.e
        C = mpmath.mpf(9) / 2 * (2 + mpmath.zeta(2 * s))
        r1 = 2 * eps * (1 - 1 / e)
        r2 = (e - 1 - eps * e - eps) / e
        return float(mpmath.log(r1 * mpmath.exp(l) * C**D * r2 ** (2 * s) * mpmath.exp(-2 * s * l)))


def test_power_increments_match_direct_formula():
    sc = CoverScheme("power", Fraction(3, 4), Fraction(3, 5), 60)
    rep = cover_sum_terms(sc)
    depths = sc.depths()
    prev = 0
    for l, (n, inc) in enumerate(zip(depths, rep.increments), 1):
        assert inc == pytest.approx(_power_increment(0.75, 0.6, 0.1, l, n - prev), rel=1e-12, abs=1e-12)
        prev = n
    assert rep.log_product[-1] == pytest.approx(sum(rep.increments))
    assert [r[0] for r in rep.rows()] == list(range(1, len(depths) + 1))


def test_power_scheme_gamma_one_is_linear():
    rep = cover_sum_terms(CoverScheme("power", 1, Fraction(3, 4), 50))
    diffs = {round(b - a, 9) for a, b in zip(rep.increments, rep.increments[1:])}
    # D_l = 1 every step, so increments drop by exactly 2s - 1
    assert diffs == {-0.5}
    assert rep.verdict == "bounded-trend"
    assert rep.crossover == 1.0


def test_power_verdicts():
    assert cover_sum_terms(CoverScheme("power", Fraction(9, 10), Fraction(3, 4), 500)).verdict == "bounded-trend"
    # D_l grows like l^{1/g - 1}; for small gamma it beats (2s-1) l within reach
    rep = cover_sum_terms(CoverScheme("power", Fraction(1, 4), Fraction(3, 5), 200))
    assert rep.verdict == "diverging-trend"
    assert rep.crossover is None


def test_square_scheme_sign_follows_sL():
    # the increment tends to (1-2s)/L + 2 logC l / L^2: bounded for s > s_L in the early range
    L = 50
    root = float(solve_sL(L).value)
    above = cover_sum_terms(CoverScheme("square", Fraction(1, 2), Fraction(root + 0.05), 30, L=L))
    below = cover_sum_terms(CoverScheme("square", Fraction(1, 2), Fraction(root - 0.05), 30, L=L))
    assert all(x < 0 for x in above.increments[:5])
    # the constant part log r1 + 2s log r2 is negative either way; compare the s-dependent part
    assert above.increments[0] < below.increments[0]


def test_cover_scheme_validation():
    with pytest.raises(DomainError):
        CoverScheme("power", 1, Fraction(1, 2), 10)
    with pytest.raises(DomainError):
        CoverScheme("power", 1, Fraction(3, 4), 10, eps=Fraction(1, 2))
    with pytest.raises(DomainError):
        CoverScheme("square", Fraction(1, 2), Fraction(3, 4), 10)
    with pytest.raises(DomainError):
        CoverScheme("cubes", 1, Fraction(3, 4), 10)


@given(st.fractions(Fraction(1, 5), Fraction(3, 1)), st.integers(2, 300))
@settings(max_examples=50, deadline=None)
def test_depths_strictly_increasing(gamma, k):
    ds = CoverScheme("power", gamma, Fraction(3, 4), k).depths()
    assert ds[0] == 1
    assert all(a < b for a, b in zip(ds, ds[1:]))


# ---- s_L

def _sL_oracle(L):
    with mpmath.workdps(40):
        f = lambda s: mpmath.log(mpmath.mpf(9) / 2 * (2 + mpmath.zeta(2 * s))) - (2 * s - 1) * L / 2
        return mpmath.findroot(f, (mpmath.mpf("0.5000001"), mpmath.mpf("0.9999")), solver="anderson")


@pytest.mark.parametrize("L", [20, 50, 100, 1000])
def test_sL_against_findroot(L):
    root = solve_sL(L)
    assert root.width <= Fraction(1, 10**9)
    ref = _sL_oracle(L)
    assert root.lo - Fraction(1, 10**12) <= Fraction(str(ref)) <= root.hi + Fraction(1, 10**12)


def test_sL_examples():
    assert float(solve_sL(20).value) == pytest.approx(0.66209, abs=1e-5)
    assert float(solve_sL(50).value) == pytest.approx(0.57465, abs=1e-5)


def test_sL_below_threshold():
    with pytest.raises(NoRoot):
        solve_sL(5)
    with pytest.raises(DomainError):
        solve_sL(0)


@given(st.integers(20, 5000), st.integers(1, 500))
@settings(max_examples=15, deadline=None)
def test_sL_monotone(L, dL):
    assert solve_sL(L + dL, precision=24).hi <= solve_sL(L, precision=24).lo


# ---- profile

def test_profile_power_gamma_one():
    prof = local_dimension_profile(ProfileQuery("power", 1, 2, 100))
    assert prof[99] == Fraction(99, 200)
    assert all(r == Fraction(n - 1, 2 * n) for n, r in enumerate(prof, 1))


def test_profile_geometric_example():
    prof = local_dimension_profile(ProfileQuery("geometric", 2, 2, 5))
    assert prof == [0, Fraction(1, 4), Fraction(3, 10), Fraction(7, 22), Fraction(15, 46)]


def _rho_direct(L, n, d):
    head = sum(L(j) for j in range(1, n))
    return head / (d * (head + L(n)) - (d - 1) * L(n))


@pytest.mark.parametrize("growth,gamma,d", [("power", 2, 3), ("geometric", 3, 2), ("power", 1, 4)])
def test_profile_matches_direct_sum(growth, gamma, d):
    L = (lambda j: Fraction(j) ** gamma) if growth == "power" else (lambda j: Fraction(gamma) ** j)
    prof = local_dimension_profile(ProfileQuery(growth, gamma, d, 30))
    assert prof == [_rho_direct(L, n, d) for n in range(1, 31)]


def test_profile_inexact_close_to_exact():
    a = local_dimension_profile(ProfileQuery("power", Fraction(3, 2), 2, 40), precision=200)
    with mpmath.workdps(60):
        L = lambda j: mpmath.mpf(j) ** mpmath.mpf(1.5)
        for n in (1, 10, 40):
            assert abs(a[n - 1] - _rho_direct(L, n, 2)) < mpmath.mpf(10) ** -50


@pytest.mark.parametrize("growth,gamma,d,lim", [
    ("power", 1, 3, Fraction(1, 3)),
    ("geometric", 2, 2, Fraction(1, 3)),
    ("geometric", 3, 3, Fraction(1, 5)),
])
def test_profile_limits(growth, gamma, d, lim):
    assert profile_limit(growth, gamma, d) == lim
    prof = local_dimension_profile(ProfileQuery(growth, gamma, d, 1000), precision=80)
    assert abs(float(prof[-1]) - float(lim)) < 1e-2


def test_power_profile_rate_is_one_over_n():
    # n |rho(n) - 1/2| should settle to a constant for L(j) = j
    prof = local_dimension_profile(ProfileQuery("power", 1, 2, 2000))
    scaled = [n * abs(r - Fraction(1, 2)) for n, r in enumerate(prof, 1)]
    assert max(scaled) == Fraction(1, 2)


def test_profile_limit_unsupported():
    with pytest.raises(Unsupported):
        profile_limit("exponential", 1)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 60))
@settings(max_examples=60, deadline=None)
def test_profile_in_unit_range(gamma, d, n):
    r = local_dimension_profile(ProfileQuery("power", gamma, d, n))[-1]
    assert 0 <= r < Fraction(1, d)


# ---- finite depth

def test_finite_depth_examples():
    A = WindowSpec.constant(Fraction(1, 2), 1, 2)
    mid = finite_depth_dimension(A, 50)
    geo = finite_depth_dimension(A, 50, "geomean", samples=16, seed=1)
    assert 0.4 < mid.estimate < 0.55
    assert abs(mid.estimate - geo.estimate) < 0.02
    assert finite_depth_dimension(A, 50, "geomean", samples=16, seed=1).estimate == geo.estimate


def test_finite_depth_near_zero_window():
    # windows before the start hold only the digit 1, which adds no count
    A = WindowSpec.constant(Fraction(1, 2), 1, Fraction(11, 10), start=10)
    est = finite_depth_dimension(A, 12)
    assert est.log_count >= 0
    assert est.log_inv_length > 0


def test_finite_depth_bad_args():
    A = WindowSpec.constant(1, 1, 2)
    with pytest.raises(DomainError):
        finite_depth_dimension(A, 0)
    with pytest.raises(DomainError):
        finite_depth_dimension(A, 5, typical="mode")


# ---- dimension table

def test_parse_grid_exact():
    assert parse_grid("0.1:0.5:0.1") == [Fraction(k, 10) for k in range(1, 6)]
    assert parse_grid("0.3,1.5") == [Fraction(3, 10), Fraction(3, 2)]
    with pytest.raises(DomainError):
        parse_grid("0:1")


def test_closed_form_values():
    assert [closed_form_dimension("exp-power", g) for g in ("0.3", "0.5", "0.7", "1.5")] == [1, Fraction(1, 2),
                                                                                       Fraction(1, 2), Fraction(1, 2)]
    assert closed_form_dimension("exp-geom", 2) == Fraction(1, 3)
    assert closed_form_dimension("exp-geom", 3) == Fraction(1, 4)
    assert closed_form_dimension("poly", 2) == 1
    with pytest.raises(Unsupported):
        closed_form_dimension("poly", Fraction(1, 2))


def test_figure1_structure():
    rows = figure1_data(parse_grid("0.1:2:0.1"))
    assert len(rows) == 20
    jumps = [r.gamma for r in rows if r.note == "jump"]
    assert jumps == [Fraction(1, 2)]
    dims = [r.dim for r in rows]
    changes = [i for i in range(1, len(dims)) if dims[i] != dims[i - 1]]
    assert len(changes) == 1 and rows[changes[0]].gamma == Fraction(1, 2)
    geo = figure1_data([Fraction(1, 2), 2, 3], families=("exp-geom",))
    assert [(r.gamma, r.dim) for r in geo] == [(2, Fraction(1, 3)), (3, Fraction(1, 4))]
