"""Command line front end: ``digitzeta <command> [options]``.

Exit status is 0 on success, 2 for bad options or systems, 1 when a
computation fails (pole, budget, non-convergence).
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

from .core import (
    BaseSequence, BudgetExceeded, DigitSet, NumerationError, central_binomial,
    geometric, make_digit_set, parse_base, parse_digits,
)
from .special import ConvergenceError, PoleError


@dataclass
class RunConfig:
    command: str
    base: BaseSequence
    digits: DigitSet
    fmt: str = "csv"
    out: str | None = None
    tol: float = 1e-8
    depth: int | None = None
    profile_points: int = 512
    max_count: int = 10 ** 7
    params: dict = field(default_factory=dict)

    def pick_depth(self, cap: int = 14) -> int:
        """--depth if given, else the deepest level whose count |d|^n fits max_count."""
        card = self.digits.cardinality
        if self.depth is not None:
            if card ** self.depth > self.max_count:
                raise BudgetExceeded(f"|d|^depth = {card ** self.depth} exceeds --max-count {self.max_count}")
            return self.depth
        n = 1
        while n < cap and card ** (n + 1) <= self.max_count:
            n += 1
        return n


# ------------------------------------------------------------------ emit

def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return "%.17g" % v
    if isinstance(v, Fraction):
        return str(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, float):
        if math.isfinite(v):
            return float("%.17g" % v)
        return str(v)
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def render(columns: list[str], rows: list[tuple], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()
    if fmt == "json":
        data = [dict(zip(columns, (_jsonable(v) for v in r))) for r in rows]
        return json.dumps({"columns": columns, "rows": data}, indent=1, sort_keys=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(report: tuple[list[str], list[tuple]], fmt: str = "csv", path: str | None = None) -> None:
    """Write a (columns, rows) report as CSV or JSON to ``path`` (stdout when None)."""
    columns, rows = report
    text = render(columns, rows, fmt)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


# --------------------------------------------------------------- reports

def report_count(cfg: RunConfig):
    from .counting import counting_fn, rep_count_exact, rep_counts_integer
    p = cfg.params
    if p.get("x"):
        rows = [(str(x), counting_fn(cfg.base, cfg.digits, x, budget=cfg.max_count).value) for x in p["x"]]
        return ["x", "S"], rows
    upto = p.get("upto")
    if upto is None:
        raise NumerationError("count needs --upto or --x")
    if cfg.base.is_integer and cfg.digits.is_integer:
        tab = rep_counts_integer(cfg.base, cfg.digits, upto)
        return ["n", "r"], [(n, int(tab.counts[n])) for n in range(upto + 1)]
    return ["n", "r"], [(n, rep_count_exact(cfg.base, cfg.digits, n).value) for n in range(upto + 1)]


def report_density(cfg: RunConfig):
    from .density import density_profile
    depth = cfg.pick_depth()
    prof = density_profile(cfg.base, cfg.digits, depth, cfg.profile_points)
    return ["x", "psi", "depth", "error_bound"], [(e.x, e.value, e.depth, e.error_bound) for e in prof.estimates]


def _beta_arg(base: BaseSequence):
    return base.param if base.is_geometric else base


def report_fourier(cfg: RunConfig):
    from .fourier import fourier_table
    K = cfg.params.get("K", 16)
    tb = fourier_table(_beta_arg(cfg.base), cfg.digits, K, tol=min(cfg.tol, 1e-10))
    return ["k", "re", "im"], [(k, tb.entries[k].real, tb.entries[k].imag) for k in range(-K, K + 1)]


def report_coeffs(cfg: RunConfig):
    from .analytic import L_coeffs, c_coeffs, radius
    M = cfg.params.get("M", 12)
    beta = _beta_arg(cfg.base)
    if cfg.params.get("radius"):
        r = radius(beta, cfg.digits)
        return ["sigma_est", "rho"], [(r.sigma_est, r.rho)]
    Lc = L_coeffs(cfg.digits, M).floats()
    cc = c_coeffs(beta, cfg.digits, M).floats()
    return ["l", "L_coeff", "c_coeff"], [(i, float(Lc[i]), float(cc[i])) for i in range(M + 1)]


def report_zeta(cfg: RunConfig):
    from . import zeta as Z
    p = cfg.params
    if p.get("poles"):
        jm, km = p["poles"]
        grid = Z.pole_grid(_beta_arg(cfg.base), cfg.digits, jm, km)
        return (["j", "k", "loc_re", "loc_im", "res_re", "res_im"],
                [(g.j, g.k, g.location.real, g.location.imag, g.residue.real, g.residue.imag) for g in grid])
    if p.get("special") is not None:
        n = p["special"]
        return ["n", "value"], [(n, Z.special_value(_beta_arg(cfg.base), cfg.digits, n))]
    s = p.get("s")
    if s is None:
        raise NumerationError("zeta needs --s, --poles or --special")
    method = p.get("method", "auto")
    if method == "auto":
        method = "continued" if cfg.base.is_geometric else "perturbed"
    if method == "direct":
        ev = Z.zeta_direct(cfg.base, cfg.digits, s)
    elif method == "continued":
        ev = Z.zeta_continued_geometric(cfg.base, cfg.digits, s, c_shift=p.get("c_shift"), tol=cfg.tol)
    elif method == "perturbed":
        ev = Z.zeta_continued_perturbed(cfg.base, cfg.digits, s, tol=cfg.tol)
    else:
        raise NumerationError(f"unknown method {method!r}")
    return (["s_re", "s_im", "value_re", "value_im", "method", "est_error"],
            [(ev.s.real, ev.s.imag, ev.value.real, ev.value.imag, ev.method, ev.est_error)])


def report_moments(cfg: RunConfig):
    from .density import density_profile
    from .moments import chow_slattery_report, log_average, moment_lhs, moment_rhs
    p = cfg.params
    if p.get("chow_slattery"):
        rep = chow_slattery_report(p["chow_slattery"], n_max=cfg.depth or 25)
        rows = [(n, lhs, rhs, gap, diff) for n, lhs, rhs, gap, diff in rep.log_average_rows]
        return ["n", "log_lhs", "log_rhs", "gap", "gap_diff"], rows
    k = p.get("k", 1.0)
    x = p.get("x0", 0.0)
    depth = cfg.pick_depth(12)
    if k <= 0:
        lhs, rhs = log_average(cfg.base, cfg.digits, x, depth, k)
        return ["k", "x", "n", "lhs", "rhs"], [(k, x, depth, lhs, rhs)]
    prof = density_profile(cfg.base, cfg.digits, depth, cfg.profile_points, with_bound=False)
    rhs = moment_rhs(cfg.base.beta, cfg.digits, k, x, prof)
    rows = [(k, x, n, moment_lhs(cfg.base, cfg.digits, k, x, n), rhs) for n in range(max(1, depth - 4), depth + 1)]
    return ["k", "x", "n", "lhs", "rhs"], rows


# --------------------------------------------------------------- figure 1

PANEL_A = dict(base=lambda: geometric(3), digits=(0, 1, 5), start=8)
PANEL_B = dict(base=central_binomial, digits=(0, 1, 3), start=6)


def figure_panel(panel: str, points: int = 1001):
    """|d|^-x S(beta^(x - floor x) b_floor(x)) on x = start + k/500, k < points."""
    from .density import _estimate, depth_error_bound
    cfg = {"a": PANEL_A, "b": PANEL_B}[panel]
    base = cfg["base"]()
    digits = make_digit_set(cfg["digits"])
    rows = []
    for k in range(points):
        x = cfg["start"] + Fraction(k, 500)
        n = math.floor(x)
        v = _estimate(base, digits, x - n, n)
        rows.append((float(x), v))
    bound = depth_error_bound(base, digits, cfg["start"]) if panel == "a" else math.nan
    return ["x", "value"], rows, bound


def report_figure1(cfg: RunConfig):
    panels = ["a", "b"] if cfg.params.get("panel", "both") == "both" else [cfg.params["panel"]]
    rows = []
    for pn in panels:
        _, r, _ = figure_panel(pn, cfg.params.get("points", 1001))
        rows.extend((pn, x, v) for x, v in r)
    return ["panel", "x", "value"], rows


REPORTS = {
    "count": report_count,
    "density": report_density,
    "fourier": report_fourier,
    "coeffs": report_coeffs,
    "zeta": report_zeta,
    "moments": report_moments,
    "figure1": report_figure1,
}


# ---------------------------------------------------------------- parsing

def _parse_s(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"--s expects re or re,im, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="digitzeta", description="Digit-expansion counting, densities and zeta functions.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--base", default="geometric")
        p.add_argument("--beta", default=None)
        p.add_argument("--digits", default="0,1")
        p.add_argument("--format", dest="fmt", choices=["csv", "json"], default="csv")
        p.add_argument("--out", default=None)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--points", type=int, default=512, dest="profile_points")
        p.add_argument("--max-count", type=int, default=10 ** 7,
                       help="cap on enumeration size (search nodes, |d|^depth)")
        return p

    p = common(sub.add_parser("count", help="r(n) table or S(x) values"))
    p.add_argument("--upto", type=int)
    p.add_argument("--x", default=None, help="comma separated S(x) queries")
    common(sub.add_parser("density", help="Psi profile on k/points"))
    p = common(sub.add_parser("fourier", help="Psi_hat(k) table"))
    p.add_argument("--K", type=int, default=16)
    p = common(sub.add_parser("coeffs", help="L and c coefficients, or radius info"))
    p.add_argument("--M", type=int, default=12)
    p.add_argument("--radius", action="store_true")
    p = common(sub.add_parser("zeta", help="evaluate zeta, list poles or special values"))
    p.add_argument("--s", default=None)
    p.add_argument("--method", choices=["auto", "direct", "continued", "perturbed"], default="auto")
    p.add_argument("--c-shift", type=int, default=None)
    p.add_argument("--poles", default=None, help="j_max,k_max")
    p.add_argument("--special", type=int, default=None)
    p = common(sub.add_parser("moments", help="moment and log-average tables"))
    p.add_argument("--k", type=float, default=1.0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--chow-slattery", default=None, help="fibonacci, lucas or tau-floor:<t>")
    p = common(sub.add_parser("figure1", help="data for both figure panels"))
    p.add_argument("--panel", choices=["a", "b", "both"], default="both")
    p.add_argument("--grid", type=int, default=1001, help="number of grid points k")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    digits = parse_digits(ns.digits)
    beta = ns.beta
    if ns.base == "geometric" and beta is None:
        beta = "2"
    base = parse_base(ns.base, beta)
    params: dict = {}
    cmd = ns.command
    if cmd == "count":
        params["upto"] = ns.upto
        if ns.x:
            params["x"] = [Fraction(t.strip()) for t in ns.x.split(",")]
    elif cmd == "fourier":
        params["K"] = ns.K
    elif cmd == "coeffs":
        params.update(M=ns.M, radius=ns.radius)
    elif cmd == "zeta":
        if ns.s is not None:
            params["s"] = _parse_s(ns.s)
        if ns.poles:
            jm, km = (int(t) for t in ns.poles.split(","))
            params["poles"] = (jm, km)
        params.update(method=ns.method, c_shift=ns.c_shift, special=ns.special)
    elif cmd == "moments":
        params.update(k=ns.k, x0=ns.x0, chow_slattery=ns.chow_slattery)
    elif cmd == "figure1":
        params.update(panel=ns.panel, points=ns.grid)
    if ns.tol <= 0:
        raise ValueError("--tol must be positive")
    if ns.depth is not None and ns.depth < 1:
        raise ValueError("--depth must be positive")
    if ns.max_count < 1:
        raise ValueError("--max-count must be positive")
    return RunConfig(cmd, base, digits, ns.fmt, ns.out, ns.tol, ns.depth, ns.profile_points,
                     ns.max_count, params)


def run(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
    except (NumerationError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"digitzeta: {exc}", file=sys.stderr)
        return 2
    try:
        report = REPORTS[cfg.command](cfg)
        emit(report, cfg.fmt, cfg.out)
    except NumerationError as exc:
        print(f"digitzeta: {exc}", file=sys.stderr)
        return 2
    except (PoleError, ConvergenceError, BudgetExceeded, ArithmeticError, ValueError) as exc:
        print(f"digitzeta: computation failed: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"digitzeta: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
