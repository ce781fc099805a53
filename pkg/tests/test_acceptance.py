"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary block at
the end lists every criterion with the measured numbers.
"""

import itertools
import json
import math
import random
import time
from fractions import Fraction

import pytest

from cfdim import cli
from cfdim.cf import cylinder, expand, khintchine_mc
from cfdim.compositions import composition_table, verify_lemma
from cfdim.constructions import (
    EMSpec,
    WindowSpec,
    largest_sandwich_failures,
    membership_diagnostics,
    stream_B,
    stream_EM,
    stream_F,
)
from cfdim.dimension import CoverScheme, ProfileQuery, cover_sum_terms, local_dimension_profile, solve_sL
from cfdim.ifs import GaussSystem, build_affine, gauss_as_ddecaying, roundtrip
from cfdim.numerics import GrowthFunction

from oracles import compositions

pytestmark = pytest.mark.acceptance


@pytest.fixture
def report(record_property):
    def _report(name, detail):
        record_property("criterion", name)
        record_property("detail", detail)
        print(f"[{name}] {detail}")
    return _report


def _brute_by_length(m, t):
    """{n: sum over compositions of m into n parts of prod i^-t}, float route."""
    powers = [0.0] + [i ** -t for i in range(1, m + 1)]
    acc = {}
    for n in range(1, m + 1):
        terms = []
        for c in compositions(m, n):
            p = 1.0
            for i in c:
                p *= powers[i]
            terms.append(p)
        acc[n] = math.fsum(terms)
    return acc


def test_1_lemma_grid(report):
    t0 = time.perf_counter()
    s_values = [Fraction(k, 100) for k in (55, 65, 75, 85, 95)]
    rep = verify_lemma(60, 12, s_values)
    worst = 0.0
    for s in s_values:
        t = 2 * s
        table = composition_table(18, 18, t, 64)
        for m in range(1, 19):
            brute = _brute_by_length(m, float(t))
            for n in range(1, m + 1):
                dp = float(table[n][m].center)
                worst = max(worst, abs(dp - brute[n]) / brute[n])
    elapsed = time.perf_counter() - t0
    report("1. composition bound grid",
           f"checked={rep.checked} violations={len(rep.violations)} indeterminate={len(rep.indeterminate)} "
           f"dp-vs-brute rel={worst:.2e} time={elapsed:.1f}s")
    assert not rep.violations and not rep.indeterminate
    assert worst <= 1e-12
    assert elapsed < 60


def test_2_cylinder_exactness(report):
    t0 = time.perf_counter()
    count = bad_len = bad_bounds = bad_round = 0
    for n in range(1, 7):
        for w in itertools.product(range(1, 9), repeat=n):
            cyl = cylinder(w)
            q, qp = cyl.convergent[1], cyl.previous[1]
            if cyl.length != Fraction(1, q * (q + qp)):
                bad_len += 1
            lo, hi = cyl.length_bounds()
            if not (lo <= cyl.length <= hi):
                bad_bounds += 1
            if tuple(expand(cyl.midpoint, n).digits) != w:
                bad_round += 1
            count += 1
    elapsed = time.perf_counter() - t0
    report("2. cylinder exactness",
           f"words={count} length={bad_len} bounds={bad_bounds} roundtrip={bad_round} time={elapsed:.1f}s")
    assert bad_len == bad_bounds == bad_round == 0
    assert count == sum(8**k for k in range(1, 7))
    assert elapsed < 120


def test_3_local_dimension_profile(report):
    prof = local_dimension_profile(ProfileQuery("power", 1, 2, 10**4))
    rho100 = prof[99]
    worst = max(n * abs(r - Fraction(1, 2)) for n, r in enumerate(prof, 1))
    d3 = float(local_dimension_profile(ProfileQuery("power", 1, 3, 1000))[-1])
    geo = float(local_dimension_profile(ProfileQuery("geometric", 2, 2, 1000))[-1])
    report("3. local dimension profile",
           f"rho(100)={rho100} max n|rho-1/2|={worst} d=3 power={d3:.5f} d=2 geometric={geo:.5f}")
    assert rho100 == Fraction(495, 1000)
    assert worst <= 1
    assert abs(d3 - 1 / 3) < 1e-2
    assert abs(geo - 1 / 3) < 1e-2


def test_4_sL_solver(report):
    t0 = time.perf_counter()
    roots = [solve_sL(L) for L in (20, 50, 100, 1000, 10000)]
    elapsed = time.perf_counter() - t0
    vals = ", ".join(f"{float(r.value):.6f}" for r in roots)
    report("4. s_L solver", f"roots=[{vals}] max width={float(max(r.width for r in roots)):.1e} time={elapsed:.2f}s")
    assert all(a.lo > b.hi for a, b in zip(roots, roots[1:]))
    assert roots[-1].hi < Fraction(51, 100)
    assert all(r.width <= Fraction(1, 10**9) for r in roots)
    assert elapsed < 10


def test_5_cover_sums(report):
    verdicts = {}
    for g, s in itertools.product(("0.6", "0.75", "0.9"), ("0.55", "0.75")):
        rep = cover_sum_terms(CoverScheme("power", Fraction(g), Fraction(s), 500))
        verdicts[(g, s)] = (rep.verdict, rep.crossover)
    detail = " ".join(f"({g},{s}):{v}" + (f"[l*~{c:.3g}]" if c and c > 1 else "")
                      for (g, s), (v, c) in verdicts.items())
    report("5. cover sums", detail)
    assert all(v == "bounded-trend" for v, _ in verdicts.values())


def test_6_constructions(report):
    t0 = time.perf_counter()
    f_stream = stream_F(1, 1)
    f_start = WindowSpec.largest(1, 1).start
    fails = largest_sandwich_failures(f_stream.take(1000), 1, 1, f_start)

    spec = WindowSpec.telescoping(Fraction(3, 5))
    b_rows = membership_diagnostics(stream_B(spec), GrowthFunction("exp-power", Fraction(3, 5)), None,
                                    [100, 300, 500], precision=128)
    b_err = [abs(float(r.s_ratio - 1)) for r in b_rows]

    em = stream_EM(EMSpec(GrowthFunction("exp-power", Fraction(2, 5)), "invlog", 2))
    em_rows = membership_diagnostics(em.take(10000), em.spec.phi, None, [100, 1000, 10000], precision=128)
    em_err = [abs(float(r.s_ratio - 1)) for r in em_rows]
    em_r = em.r(10000) / 10000
    elapsed = time.perf_counter() - t0
    report("6. constructions",
           f"(a) F start={f_start} failures={len(fails)}; (b) B errors={[f'{e:.2e}' for e in b_err]}; "
           f"(c) E_M errors={[f'{e:.3f}' for e in em_err]} r/n={em_r:.4f}; time={elapsed:.1f}s")
    assert not fails
    assert b_err[0] > b_err[1] > b_err[2] and b_err[2] < 0.1
    assert em_err[0] > em_err[1] > em_err[2]
    assert em_r < 0.05
    assert elapsed < 300


def test_7_ifs(report):
    aff = build_affine(3)
    checks = aff.check_conditions(1000)
    gauss = gauss_as_ddecaying()
    g_checks = gauss.check_conditions(1000)
    xi_ok = all(gauss.xi(i).contains(Fraction(1, (i + 1) ** 2)) and gauss.lam(i).contains(Fraction(1, i * i))
                for i in range(1, 1001))
    sup = gauss.check_contraction()

    # roundtrip: exhaustive where enumeration is feasible, random beyond
    words = [w for n in (1, 2) for w in itertools.product(range(1, 51), repeat=n)]
    words += [w for n in range(3, 9) for w in itertools.product(range(1, 4), repeat=n)]
    rng = random.Random(2024)
    words += [tuple(rng.randint(1, 50) for _ in range(rng.randint(1, 8))) for _ in range(2000)]
    g = GaussSystem()
    bad = sum(roundtrip(aff, w) != list(w) or roundtrip(g, w) != list(w) for w in words)
    report("7. ifs",
           f"affine checks={[c.passed for c in checks]} gauss checks={[c.passed for c in g_checks]} "
           f"xi/lam ok={xi_ok} {sup.detail}; roundtrip words={len(words)} bad={bad}")
    assert all(c.passed for c in checks)
    assert all(c.passed for c in g_checks) and xi_ok
    assert gauss.d == 2 and gauss.A <= Fraction(1, 4)
    assert sup.passed
    assert bad == 0


def test_8_khintchine(report):
    t0 = time.perf_counter()
    main = khintchine_mc(10**4, 10**4, seed=1)
    shallow = khintchine_mc(1000, 10**3, seed=1)
    deep = khintchine_mc(400, 10**5, seed=1)
    elapsed = time.perf_counter() - t0
    target = main.target
    report("8. khintchine",
           f"median(1e4 x 1e4)={main.median:.4f} depth 1e3={shallow.median:.4f} depth 1e5={deep.median:.4f} "
           f"target={target:.4f} time={elapsed:.0f}s")
    assert 1.2 <= main.median <= 1.7
    assert abs(deep.median - target) < abs(shallow.median - target)
    assert elapsed < 300


def test_9_figure1(report, capsys):
    assert cli.main(["figure1", "--gamma-grid", "0.3,0.5,0.7,1.5", "--format", "json"]) == 0
    power = json.loads(capsys.readouterr().out)
    assert cli.main(["figure1", "--gamma-grid", "2,3", "--families", "exp-geom", "--format", "json"]) == 0
    geo = json.loads(capsys.readouterr().out)
    assert cli.main(["figure1", "--gamma-grid", "0.1:2.0:0.1", "--format", "json"]) == 0
    full = json.loads(capsys.readouterr().out)
    col = lambda doc, name: [r[doc["columns"].index(name)] for r in doc["rows"]]
    got_p = col(power, "dim")
    got_g = col(geo, "dim")
    dims = col(full, "dim")
    gammas = col(full, "gamma")
    jumps = [gammas[i] for i in range(1, len(dims)) if dims[i] != dims[i - 1]]
    report("9. figure1", f"exp-power={got_p} exp-geom={got_g} jumps at {jumps} rows={len(dims)}")
    assert got_p == ["1", "0.5", "0.5", "0.5"]
    assert [Fraction(x) for x in got_g] == [Fraction(1, 3), Fraction(1, 4)]
    assert jumps == ["0.5"] and len(dims) == 20


def test_10_reproducibility(report, tmp_path, capsys):
    from test_cli import RUNS

    mismatched = []
    for k, argv in enumerate(RUNS):
        assert cli.main(argv) == 0
        direct = capsys.readouterr().out
        assert cli.main(argv + ["--emit-config"]) == 0
        path = tmp_path / f"run{k}.json"
        path.write_text(capsys.readouterr().out)
        assert cli.main(["--config", str(path)]) == 0
        if capsys.readouterr().out != direct:
            mismatched.append(" ".join(argv[:2]))
    commands = {cli.parse(a)[0].command for a in RUNS}
    report("10. reproducibility", f"runs={len(RUNS)} commands={len(commands)} mismatched={mismatched}")
    assert not mismatched
    assert commands == set(cli.COMMANDS)
