"""Command-line front end.

Every run echoes its full configuration as ``#`` comment lines before the
data, and ``--emit-config`` prints that configuration as JSON so that
``--config FILE`` replays the run to byte-identical output.

Exit status: 0 success, 2 invalid configuration, 3 a mathematical
precondition failed inside the library (the message names it).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from . import cf, compositions, constructions, dimension, ifs, numerics
from .errors import CfdimError
from .numerics import BigReal, GrowthFunction

FORMATS = ("csv", "json", "text")


class ConfigError(Exception):
    """Invalid command-line or config-file input (exit status 2)."""


# --------------------------------------------------------------------------
# value parsing


def _fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{what}: cannot read {text!r} as an exact rational") from None


def _fractions(text: str, what: str) -> list[Fraction]:
    if ":" in str(text):
        try:
            return dimension.parse_grid(str(text))
        except (ValueError, ZeroDivisionError, CfdimError) as exc:
            raise ConfigError(f"{what}: {exc}") from None
    return [_fraction(t, what) for t in str(text).split(",") if t.strip()]


def _ints(text: str, what: str) -> list[int]:
    text = str(text)
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            a, b, h = parts
            if h <= 0:
                raise ValueError
            return list(range(a, b + 1, h))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected integers like '1,2,3' or 'a:b[:step]', got {text!r}") from None


def _growth(text: str) -> GrowthFunction:
    try:
        return GrowthFunction.parse(text)
    except CfdimError as exc:
        raise ConfigError(f"--phi: {exc}") from None


NAMED_POINTS: dict[str, Callable[[int], BigReal]] = {
    "e-2": lambda p: BigReal.exact(1, p).exp() - 2,
    "sqrt2-1": lambda p: BigReal.exact(2, p).sqrt() - 1,
    "pi-3": lambda p: BigReal.pi(p) - 3,
    "golden-1": lambda p: (BigReal.exact(5, p).sqrt() - 1) / 2,
}


def _point(text: str):
    if text in NAMED_POINTS:
        return NAMED_POINTS[text]
    return _fraction(text, "--x")


# --------------------------------------------------------------------------
# output


def fmt(v, digits: int = 20) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, BigReal):
        return v.decimal(digits)
    if isinstance(v, Fraction):
        return _fraction_text(v)
    if isinstance(v, float):
        return format(v, ".12g")
    if v is None:
        return ""
    return str(v)


def _fraction_text(q: Fraction) -> str:
    """Exact decimal when the denominator is 2^a 5^b, else p/q."""
    den = q.denominator
    k = 0
    while den % 2 == 0:
        den //= 2
        k += 1
    j = 0
    while den % 5 == 0:
        den //= 5
        j += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    if q.denominator == 1:
        return str(q.numerator)
    places = max(k, j)
    scaled = q * 10**places
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{s[:-places]}.{s[-places:]}".rstrip("0")


def radius_text(v: BigReal) -> str:
    return mpmath_str(v.radius)


def mpmath_str(x) -> str:
    import mpmath

    return mpmath.nstr(x, 3, min_fixed=1, max_fixed=0)


@dataclass
class Result:
    columns: list[str] = field(default_factory=list)
    rows: list[list[Any]] = field(default_factory=list)
    summary: dict[str, Any] = field(default_factory=dict)
    text: list[str] = field(default_factory=list)


@dataclass
class RunConfig:
    command: str
    params: dict
    format: str

    def to_json(self) -> str:
        return json.dumps({"command": self.command, "format": self.format, "params": self.params},
                          sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(d, dict) or set(d) - {"command", "format", "params"} or "command" not in d:
            raise ConfigError("config must be an object with keys command, format, params")
        params = d.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("config params must be an object")
        return cls(d["command"], params, d.get("format", "csv"))


def render(cfg: RunConfig, res: Result) -> str:
    head = [f"# cfdim {cfg.command}", f"# config: {cfg.to_json()}"]
    if cfg.format == "json":
        doc = {
            "config": json.loads(cfg.to_json()),
            "columns": res.columns,
            "rows": [[fmt(v) for v in row] for row in res.rows],
            "summary": {k: fmt(v) for k, v in res.summary.items()},
        }
        if res.text:
            doc["text"] = res.text
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    out = io.StringIO()
    out.write("\n".join(head) + "\n")
    if cfg.format == "text":
        for line in res.text:
            out.write(line + "\n")
        for k, v in res.summary.items():
            out.write(f"{k}: {fmt(v)}\n")
        return out.getvalue()
    if res.columns:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(res.columns)
        for row in res.rows:
            w.writerow([fmt(v) for v in row])
    for k, v in res.summary.items():
        out.write(f"# {k}: {fmt(v)}\n")
    return out.getvalue()


# --------------------------------------------------------------------------
# command handlers (params are plain JSON values)


def cmd_expand(p) -> Result:
    x = _point(p["x"])
    depth = p["depth"]
    exp = cf.expand(x, depth)
    word = list(exp.digits)
    conv = cf.convergents(word)
    st = cf.stats(word)
    res = Result(["k", "a_k", "p_k", "q_k", "S_k", "T_k"])
    for k, (a, (pk, qk), s, t) in enumerate(zip(word, conv, st.S, st.T), 1):
        res.rows.append([k, a, pk, qk, s, t])
    res.text = [f"[{','.join(map(str, word))}]" + (" (terminated)" if exp.terminated else "")]
    res.summary = {"terminated": exp.terminated, "digits": len(word)}
    return res


def cmd_cylinder(p) -> Result:
    word = _ints(p["word"], "--word")
    try:
        c = cf.cylinder(word)
    except CfdimError:
        raise
    lo, hi = c.length_bounds()
    res = Result(["n", "left", "right", "length", "lower_bound", "upper_bound", "p_n", "q_n"])
    res.rows.append([len(word), c.left, c.right, c.length, lo, hi, c.convergent[0], c.convergent[1]])
    res.text = [f"({c.left}, {c.right}) length {c.length}", f"bounds {lo} <= {c.length} <= {hi}"]
    return res


def cmd_khintchine(p) -> Result:
    s = cf.khintchine_mc(p["samples"], p["depth"], seed=p["seed"], workers=p["workers"])
    res = Result(["depth", "samples", "bits", "median", "q1", "q3", "target"])
    res.rows.append([s.depth, s.samples, s.bits, s.median, s.q1, s.q3, s.target])
    return res


def cmd_composition_sum(p) -> Result:
    t = _fraction(p["t"], "--t")
    m, n, prec = p["m"], p["n"], p["precision"]
    lhs = compositions.composition_sum(m, n, t, prec)
    res = Result(["m", "n", "t", "sum", "sum_radius", "bound", "bound_radius", "constant", "precision"])
    if t > 1:
        bound = compositions.lemma_bound(m, n, t, prec)
        const = compositions.generalized_bound_constant(t, prec)
        res.rows.append([m, n, t, lhs, radius_text(lhs), bound, radius_text(bound), const, prec])
        res.summary["holds"] = lhs.certainly_le(bound)
    else:
        res.rows.append([m, n, t, lhs, radius_text(lhs), None, None, None, prec])
        res.summary["bound"] = "infinite for t <= 1"
    return res


def cmd_lemma_verify(p) -> Result:
    svals = _fractions(p["s"], "--s")
    res = Result(["s", "t", "checked", "violations", "indeterminate", "max_ratio"])
    total_v = total_c = 0
    worst = 0.0
    for s in svals:
        r = compositions.verify_lemma(p["m_max"], p["n_max"], [s], d=p["d"], precision=p["precision"])
        res.rows.append([s, p["d"] * s, r.checked, len(r.violations), len(r.indeterminate), r.max_ratio])
        total_v += len(r.violations)
        total_c += r.checked
        worst = max(worst, r.max_ratio)
    res.summary = {"checked": total_c, "violations": total_v, "max_ratio": worst}
    res.text = []
    return res


def cmd_zeta(p) -> Result:
    res = Result(["t", "zeta", "radius", "precision"])
    for t in _fractions(p["t"], "--t"):
        z = numerics.zeta(t, p["precision"])
        res.rows.append([t, z.decimal(max(10, int(p["precision"] * 0.30103) - 2)), radius_text(z), p["precision"]])
    return res


def cmd_growth(p) -> Result:
    phi = _growth(p["phi"])
    res = Result(["n", "phi", "radius", "floor", "precision"])
    for n in _ints(p["n"], "--n"):
        v = numerics.eval_growth(phi, n, p["precision"])
        fl = numerics.certified_floor(lambda prec: phi.value(n, prec),
                                      numerics.magnitude_schedule(phi.magnitude_bits(n) + 4))
        res.rows.append([n, v, radius_text(v), fl, p["precision"]])
    return res


def _window_spec(p, family=None) -> constructions.WindowSpec:
    fam = family or p["family"]
    g = _fraction(p["gamma"], "--gamma")
    start = p.get("start")
    if fam == "const":
        c1, c2 = _fraction(p["c1"], "--c1"), _fraction(p["c2"], "--c2")
        if start is None:
            start = constructions.n_zero(g, c1, c2)
        return constructions.WindowSpec.constant(g, c1, c2, start)
    if fam == "telescoping":
        return constructions.WindowSpec.telescoping(g, start=start, horizon=p.get("horizon") or 2000)
    if fam == "largest":
        return constructions.WindowSpec.largest(g, _fraction(p["alpha"], "--alpha"), start=start)
    spec = constructions.WindowSpec("expgap", g, {"c": _fraction(p["c1"], "--c1"), "rate": _fraction(p["rate"], "--rate")}, 1)
    return spec.with_start(start if start is not None else constructions.n_one(spec, p.get("horizon") or 2000))


def cmd_windows(p) -> Result:
    spec = _window_spec(p)
    res = Result(["n", "low", "high", "count"])
    for n in _ints(p["n"], "--n"):
        try:
            w = constructions.digit_window(spec, n)
            res.rows.append([n, w.start, w.stop - 1, w.stop - w.start])
        except constructions.EmptyWindow:
            res.rows.append([n, None, None, 0])
    res.summary["start"] = spec.start
    if spec.family == "const":
        res.summary["N0"] = constructions.n_zero(spec.gamma, spec.p["c1"], spec.p["c2"])
    if p["check_assumptions"]:
        rep = constructions.check_B_assumptions(spec, p["check_assumptions"])
        for c in rep.checks:
            res.summary[c.name] = f"{'pass' if c.passed else 'fail'} ({c.rule}; last value {c.values[-1][1]:.6g})"
        res.summary["assumptions"] = "pass" if rep.passed else "fail"
    return res


def _stream(p):
    kind = p["kind"]
    if kind == "EM":
        spec = constructions.EMSpec(_growth(p["phi"]), p["psi"], p["M"], p["filler"], p["seed"])
        return constructions.stream_EM(spec)
    if kind == "A":
        return constructions.stream_B(_window_spec(p, "const"), p["policy"], p["seed"], provenance="A")
    if kind == "mu":
        spec = _window_spec(p, "const")
        return constructions.stream_B(spec, "random", p["seed"], provenance="mu")
    if kind == "F":
        return constructions.stream_B(_window_spec(p, "largest"), p["policy"], p["seed"], provenance="F")
    return constructions.stream_B(_window_spec(p), p["policy"], p["seed"], provenance="B")


def cmd_construct(p) -> Result:
    stream = _stream(p)
    depth = p["depth"]
    digits = stream.take(depth)
    res = Result(["n", "a_n", "S_n", "T_n"])
    s = t = 0
    marks = set(getattr(stream, "indices", []))
    if marks:
        res.columns.append("index_k")
    for n, a in enumerate(digits, 1):
        s += a
        t = max(t, a)
        row = [n, a, s, t]
        if marks:
            row.append(stream.indices.index(n) + 1 if n in marks else None)
        res.rows.append(row)
    res.summary["stream"] = stream.to_json()
    if isinstance(stream, constructions.EMStream):
        d = stream.lipschitz_diagnostics(depth)
        res.summary.update({"r(n)": d["r"], "r(n)/n": d["r_over_n"], "log_product/n": d["log_product_over_n"]})
    return res


def cmd_diagnose(p) -> Result:
    stream = _stream(p)
    phi = _growth(p["phi"]) if p["phi"] else GrowthFunction("exp-power", _fraction(p["gamma"], "--gamma"))
    gamma_t = None if p["kind"] == "EM" and not p["gamma_t"] else _fraction(p["gamma_t"] or p["gamma"], "--gamma-t")
    depths = _ints(p["depths"], "--depths")
    rows = constructions.membership_diagnostics(stream, phi, gamma_t, depths, p["precision"])
    res = Result(["n", "S_n", "T_n", "S_over_phi", "S_radius", "T_over_exp", "T_radius", "precision"])
    for r in rows:
        res.rows.append([r.n, r.S, r.T, r.s_ratio, radius_text(r.s_ratio), r.t_ratio,
                         None if r.t_ratio is None else radius_text(r.t_ratio), p["precision"]])
    if isinstance(stream, constructions.EMStream):
        d = stream.lipschitz_diagnostics(depths[-1])
        res.summary.update({"r(n)": d["r"], "r(n)/n": d["r_over_n"], "log_product/n": d["log_product_over_n"]})
    return res


def cmd_cover_sum(p) -> Result:
    scheme = dimension.CoverScheme(p["scheme"], _fraction(p["gamma"], "--gamma"), _fraction(p["s"], "--s"),
                                   p["k_max"], _fraction(p["eps"], "--eps"),
                                   _fraction(p["L"], "--L") if p["L"] else None)
    rep = dimension.cover_sum_terms(scheme)
    res = Result(["l", "log_factor", "log_product"])
    for l, inc, tot in rep.rows():
        res.rows.append([l, inc, tot])
    res.summary = {"verdict": rep.verdict, "verdict_rule": "heuristic: last 20% of log factors negative"}
    if rep.crossover is not None:
        res.summary["main_term_crossover"] = rep.crossover
    return res


def cmd_solve_sl(p) -> Result:
    res = Result(["L", "s_lo", "s_hi", "s_L", "width"])
    for L in _fractions(p["L"], "--L"):
        r = dimension.solve_sL(L, p["precision"])
        res.rows.append([L, float(r.lo), float(r.hi), format(float(r.value), ".15f"), float(r.width)])
    return res


def cmd_profile(p) -> Result:
    q = dimension.ProfileQuery(p["growth"], _fraction(p["gamma"], "--gamma"), p["d"], p["n_max"])
    prof = dimension.local_dimension_profile(q)
    res = Result(["n", "rho", "rho_decimal"])
    step = max(1, p["every"])
    for n in range(1, q.n_max + 1):
        if n % step and n != q.n_max:
            continue
        v = prof[n - 1]
        res.rows.append([n, v if isinstance(v, Fraction) else None, float(v)])
    try:
        res.summary["limit"] = dimension.profile_limit(q.growth, q.gamma, q.d)
    except CfdimError:
        pass
    return res


def cmd_dimension_estimate(p) -> Result:
    spec = _window_spec(p)
    res = Result(["depth", "log_count", "log_inv_length", "estimate"])
    for n in _ints(p["depths"], "--depths"):
        e = dimension.finite_depth_dimension(spec, n, p["typical"], p["samples"], p["seed"])
        res.rows.append([n, e.log_count, e.log_inv_length, e.estimate])
    return res


def cmd_figure1(p) -> Result:
    grid = _fractions(p["gamma_grid"], "--gamma-grid")
    fams = [f.strip() for f in p["families"].split(",") if f.strip()]
    rows = dimension.figure1_data(grid, fams)
    res = Result(["gamma", "family", "dim", "dim_decimal", "note"])
    for r in rows:
        res.rows.append([r.gamma, r.family, r.dim, float(r.dim), r.note])
    return res


def _system(p):
    if p["model"] == "gauss":
        return ifs.gauss_as_ddecaying(p["precision"])
    return ifs.build_affine(_fraction(p["d"], "--d"), p["precision"])


def cmd_ifs_build(p) -> Result:
    sysm = _system(p)
    res = Result(["condition", "passed", "detail"])
    for c in sysm.check_conditions(p["i_max"]):
        res.rows.append([c.name, c.passed, c.detail])
    res.summary = {"model": sysm.model, "d": sysm.d, "m": sysm.m, "A": float(sysm.A)}
    if isinstance(sysm, ifs.AffineGaussLike):
        res.summary["w_1"] = sysm.w(1)
        res.summary["T_2"] = sysm.T(2)
    return res


def cmd_ifs_project(p) -> Result:
    sysm = _system(p)
    word = _ints(p["word"], "--word")
    v = ifs.project(sysm, word, _fraction(p["at"], "--at"))
    res = Result(["n", "value", "radius", "precision"])
    if isinstance(v, Fraction):
        res.rows.append([len(word), v, 0, "exact"])
    else:
        res.rows.append([len(word), v, radius_text(v), sysm.precision])
    return res


def cmd_ifs_expand(p) -> Result:
    sysm = _system(p)
    digits = ifs.symbolic_expand(sysm, _fraction(p["x"], "--x"), p["n"])
    res = Result(["k", "digit"], [[k, a] for k, a in enumerate(digits, 1)])
    res.text = [f"[{','.join(map(str, digits))}]"]
    return res


def cmd_ifs_predict(p) -> Result:
    pred = ifs.predicted_dimension(_fraction(p["d"], "--d"), _growth(p["phi"]), p["n_max"])
    res = Result(["n", "rho"])
    if pred.profile:
        step = max(1, p["n_max"] // 10)
        for n in range(step, p["n_max"] + 1, step):
            res.rows.append([n, float(pred.profile[n - 1])])
    res.summary = {"predicted": pred.value, "predicted_decimal": float(pred.value)}
    return res


# --------------------------------------------------------------------------
# parser and registry


@dataclass
class Command:
    name: str
    handler: Callable[[dict], Result]
    default_format: str = "csv"


COMMANDS: dict[str, Command] = {}

# library operation -> the single subcommand that reaches it
OPERATIONS = {
    "numerics.zeta": "zeta",
    "numerics.certified_floor": "growth",
    "numerics.eval_growth": "growth",
    "cf.expand": "expand",
    "cf.convergents": "expand",
    "cf.stats": "expand",
    "cf.cylinder": "cylinder",
    "cf.khintchine_mc": "khintchine",
    "compositions.composition_sum": "composition-sum",
    "compositions.lemma_bound": "composition-sum",
    "compositions.generalized_bound_constant": "composition-sum",
    "compositions.verify_lemma": "lemma-verify",
    "constructions.n_zero": "windows",
    "constructions.digit_window": "windows",
    "constructions.check_B_assumptions": "windows",
    "constructions.stream_B": "construct",
    "constructions.sample_mu": "construct",
    "constructions.stream_EM": "construct",
    "constructions.membership_diagnostics": "diagnose",
    "dimension.cover_sum_terms": "cover-sum",
    "dimension.solve_sL": "solve-sl",
    "dimension.local_dimension_profile": "profile",
    "dimension.finite_depth_dimension": "dimension-estimate",
    "dimension.figure1_data": "figure1",
    "ifs.build_affine": "ifs build",
    "ifs.gauss_as_ddecaying": "ifs build",
    "ifs.project": "ifs project",
    "ifs.symbolic_expand": "ifs expand",
    "ifs.predicted_dimension": "ifs predict",
}

_SUBPARSERS: dict[str, argparse.ArgumentParser] = {}
_META = {"command", "format", "emit_config", "output", "config", "ifs_action"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _add_window_args(sp, family_default="telescoping", with_family=True):
    if with_family:
        sp.add_argument("--family", default=family_default, choices=constructions.WINDOW_FAMILIES)
    sp.add_argument("--gamma", default="0.6")
    sp.add_argument("--c1", default="1")
    sp.add_argument("--c2", default="2")
    sp.add_argument("--alpha", default="1")
    sp.add_argument("--rate", default="1")
    sp.add_argument("--start", type=int, default=None, help="window start N (default: least admissible)")
    sp.add_argument("--horizon", type=int, default=2000, help="search horizon for the window start")


def _add_stream_args(sp):
    sp.add_argument("kind", choices=("A", "B", "EM", "F", "mu"))
    _add_window_args(sp)
    sp.add_argument("--policy", default="min", choices=constructions.POLICIES)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--phi", default=None, help="growth function, e.g. exp-power:0.4")
    sp.add_argument("--psi", default="invlog", choices=sorted(numerics.PSI_FUNCTIONS))
    sp.add_argument("--M", type=int, default=2)
    sp.add_argument("--filler", default="cycle", choices=("cycle", "random"))


def _add_system_args(sp):
    sp.add_argument("--model", default="affine", choices=("affine", "gauss"))
    sp.add_argument("--d", default="3")
    sp.add_argument("--precision", type=int, default=128)


def _register(sub, name, handler, build, default_format="csv", help=None):
    sp = sub.add_parser(name.split()[-1], help=help)
    build(sp)
    sp.add_argument("--format", choices=FORMATS, default=None)
    sp.add_argument("--output", default=None, help="write to a file instead of stdout")
    sp.add_argument("--emit-config", action="store_true", help="print the run configuration as JSON and exit")
    sp.set_defaults(command=name)
    COMMANDS[name] = Command(name, handler, default_format)
    _SUBPARSERS[name] = sp
    return sp


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfdim", description="Continued-fraction digit growth and Hausdorff dimension experiments")
    parser.add_argument("--config", default=None, help="replay a JSON config written by --emit-config")
    sub = parser.add_subparsers(dest="top", parser_class=_Parser)

    def b_expand(sp):
        sp.add_argument("--x", required=True, help="rational p/q, decimal, or one of " + ", ".join(NAMED_POINTS))
        sp.add_argument("--depth", type=int, default=10)

    def b_cylinder(sp):
        sp.add_argument("--word", required=True, help="digits, e.g. 1,2,3")

    def b_khintchine(sp):
        sp.add_argument("--samples", type=int, default=1000)
        sp.add_argument("--depth", type=int, default=1000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)

    def b_compsum(sp):
        sp.add_argument("--m", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--t", default="1.5")
        sp.add_argument("--precision", type=int, default=64)

    def b_lemma(sp):
        sp.add_argument("--m-max", type=int, default=60)
        sp.add_argument("--n-max", type=int, default=12)
        sp.add_argument("--s", default="0.55,0.65,0.75,0.85,0.95")
        sp.add_argument("--d", type=int, default=2)
        sp.add_argument("--precision", type=int, default=64)

    def b_zeta(sp):
        sp.add_argument("--t", required=True, help="comma list or start:stop:step")
        sp.add_argument("--precision", type=int, default=64)

    def b_growth(sp):
        sp.add_argument("--phi", required=True)
        sp.add_argument("--n", default="1:10")
        sp.add_argument("--precision", type=int, default=64)

    def b_windows(sp):
        _add_window_args(sp)
        sp.add_argument("--n", default="1:20")
        sp.add_argument("--check-assumptions", type=int, default=0, metavar="HORIZON")

    def b_construct(sp):
        _add_stream_args(sp)
        sp.add_argument("--depth", type=int, default=20)

    def b_diagnose(sp):
        _add_stream_args(sp)
        sp.add_argument("--gamma-t", default=None, help="exponent for T_n/e^{n^gamma} (default --gamma)")
        sp.add_argument("--depths", default="10,100")
        sp.add_argument("--precision", type=int, default=64)

    def b_cover(sp):
        sp.add_argument("--scheme", default="power", choices=dimension.SCHEMES)
        sp.add_argument("--gamma", default="0.75")
        sp.add_argument("--s", default="0.6")
        sp.add_argument("--eps", default="0.1")
        sp.add_argument("--k-max", type=int, default=200)
        sp.add_argument("--L", default=None)

    def b_solve(sp):
        sp.add_argument("--L", default="20,50,100,1000,10000")
        sp.add_argument("--precision", type=int, default=32)

    def b_profile(sp):
        sp.add_argument("--growth", default="power", choices=dimension.GROWTH_TAGS)
        sp.add_argument("--gamma", default="1")
        sp.add_argument("--d", type=int, default=2)
        sp.add_argument("--n-max", type=int, default=100)
        sp.add_argument("--every", type=int, default=1, help="emit every k-th n")

    def b_dimest(sp):
        _add_window_args(sp, "const")
        sp.add_argument("--depths", default="15,30,60")
        sp.add_argument("--typical", default="midpoint", choices=("midpoint", "geomean"))
        sp.add_argument("--samples", type=int, default=32)
        sp.add_argument("--seed", type=int, default=0)

    def b_figure(sp):
        sp.add_argument("--gamma-grid", default="0.1:2.0:0.1")
        sp.add_argument("--families", default="exp-power", help="comma list of " + ",".join(dimension.FIGURE_FAMILIES))

    _register(sub, "expand", cmd_expand, b_expand, "text", "continued-fraction digits of a point")
    _register(sub, "cylinder", cmd_cylinder, b_cylinder, help="exact basic interval of a digit word")
    _register(sub, "khintchine", cmd_khintchine, b_khintchine, help="Monte Carlo S_n/(n log n)")
    _register(sub, "composition-sum", cmd_composition_sum, b_compsum, help="composition sum and its zeta bound")
    _register(sub, "lemma-verify", cmd_lemma_verify, b_lemma, help="check the composition bound on a grid")
    _register(sub, "zeta", cmd_zeta, b_zeta, help="certified Riemann zeta values")
    _register(sub, "growth", cmd_growth, b_growth, help="evaluate a growth function phi(n)")
    _register(sub, "windows", cmd_windows, b_windows, help="digit windows of an A/B set")
    _register(sub, "construct", cmd_construct, b_construct, help="digit stream of A, B, E_M, F or mu")
    _register(sub, "diagnose", cmd_diagnose, b_diagnose, help="S_n/phi(n) and T_n/e^{n^gamma} of a stream")
    _register(sub, "cover-sum", cmd_cover_sum, b_cover, help="cover-sum product factors")
    _register(sub, "solve-sl", cmd_solve_sl, b_solve, help="root s_L of the zeta/exponential equation")
    _register(sub, "profile", cmd_profile, b_profile, help="local dimension profile rho(n)")
    _register(sub, "dimension-estimate", cmd_dimension_estimate, b_dimest, help="finite-depth dimension estimate")
    _register(sub, "figure1", cmd_figure1, b_figure, help="dimension of E_phi across growth families")

    ifs_p = sub.add_parser("ifs", help="d-decaying iterated function systems")
    ifs_sub = ifs_p.add_subparsers(dest="ifs_action", parser_class=_Parser)
    ifs_sub.required = True

    def b_build(sp):
        _add_system_args(sp)
        sp.add_argument("--i-max", type=int, default=1000)

    def b_project(sp):
        _add_system_args(sp)
        sp.add_argument("--word", required=True)
        sp.add_argument("--at", default="1")

    def b_iexpand(sp):
        _add_system_args(sp)
        sp.add_argument("--x", required=True)
        sp.add_argument("--n", type=int, default=10)

    def b_predict(sp):
        sp.add_argument("--d", default="2")
        sp.add_argument("--phi", required=True)
        sp.add_argument("--n-max", type=int, default=1000)

    _register(ifs_sub, "ifs build", cmd_ifs_build, b_build, help="build a system and check its conditions")
    _register(ifs_sub, "ifs project", cmd_ifs_project, b_project, help="project a digit word to a point")
    _register(ifs_sub, "ifs expand", cmd_ifs_expand, b_iexpand, "text", help="symbolic expansion of a point")
    _register(ifs_sub, "ifs predict", cmd_ifs_predict, b_predict, help="predicted dimension of E_d(phi)")
    return parser


def _params(ns: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(ns).items() if k not in _META and k != "top"}


def _argv_from_config(cfg: RunConfig) -> list[str]:
    """Rebuild command-line tokens for a config so it is validated by the same parser."""
    if cfg.command not in _SUBPARSERS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    sp = _SUBPARSERS[cfg.command]
    actions = {a.dest: a for a in sp._actions if a.dest not in ("help",) and a.dest not in _META}
    unknown = set(cfg.params) - set(actions)
    if unknown:
        raise ConfigError(f"unknown parameters for {cfg.command}: {sorted(unknown)}")
    argv = cfg.command.split()
    for dest, action in actions.items():
        if dest not in cfg.params:
            continue
        v = cfg.params[dest]
        if not action.option_strings:
            argv.insert(len(cfg.command.split()), str(v))
        elif isinstance(action, argparse._StoreTrueAction):
            if v:
                argv.append(action.option_strings[0])
        elif v is not None:
            argv += [action.option_strings[0], str(v)]
    if cfg.format:
        argv += ["--format", cfg.format]
    return argv


def parse(argv: list[str]) -> tuple[RunConfig, argparse.Namespace]:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.config:
        if getattr(ns, "command", None):
            raise ConfigError("--config replaces the subcommand; give one or the other")
        try:
            with open(ns.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        cfg = RunConfig.from_json(text)
        ns = build_parser().parse_args(_argv_from_config(cfg))
    if not getattr(ns, "command", None):
        raise ConfigError("no subcommand given (try --help)")
    fmt_ = ns.format or COMMANDS[ns.command].default_format
    return RunConfig(ns.command, _params(ns), fmt_), ns


def run(cfg: RunConfig) -> str:
    return render(cfg, COMMANDS[cfg.command].handler(cfg.params))


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, ns = parse(argv)
    except ConfigError as exc:
        print(f"cfdim: error: {exc}", file=sys.stderr)
        return 2
    if ns.emit_config:
        print(cfg.to_json())
        return 0
    try:
        text = run(cfg)
    except ConfigError as exc:
        print(f"cfdim: error: {exc}", file=sys.stderr)
        return 2
    except CfdimError as exc:
        print(f"cfdim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    if ns.output:
        with open(ns.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
