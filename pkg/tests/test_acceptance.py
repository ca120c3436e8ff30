"""The ten acceptance criteria, each at its stated tolerance and time budget.

Every test records one PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion still reports its numbers.
"""
import cmath
import math
import random
import time
from fractions import Fraction

import mpmath
import numpy as np
from scipy import integrate

from digitzeta.analytic import P, c_coeffs, euler_maclaurin_identity_check, radius
from digitzeta.cli import figure_panel
from digitzeta.core import (
    fibonacci, geometric, lucas, make_digit_set, tau_floor,
)
from digitzeta.counting import (
    S, bruteforce_histogram, rep_counts_integer, verify_upper_bound,
)
from digitzeta.density import (
    density_profile, depth_error_bound, psi_scaling, sandwich_check,
)
from digitzeta.fourier import fourier_table, psi_hat, psi_hat_product_form, resum
from digitzeta.moments import chow_slattery_report, moment_lhs, moment_rhs
from digitzeta.special import (
    gamma_complex, upper_incomplete_gamma,
)
from digitzeta.zeta import (
    residue, zeta_continued_geometric, zeta_direct,
)

BIN = make_digit_set([0, 1])
D013 = make_digit_set([0, 1, 3])
D015 = make_digit_set([0, 1, 5])


class Clock:
    def __init__(self):
        self.t0 = time.perf_counter()

    def __call__(self):
        return time.perf_counter() - self.t0


def test_criterion_01_binary_reduction(record):
    clk = Clock()
    g = geometric(2)
    tab = rep_counts_integer(g, BIN, 10 ** 4)
    r_ok = bool(np.all(tab.counts == 1))
    rng = random.Random(1)
    xs = [Fraction(rng.uniform(0, 1e6)) for _ in range(1000)]
    s_ok = all(S(g, BIN, x) == math.floor(x) + 1 for x in xs)
    z2 = zeta_continued_geometric(2, BIN, 2).value
    z0 = zeta_continued_geometric(2, BIN, 0).value
    zm1 = zeta_continued_geometric(2, BIN, -1).value
    res = residue(2, BIN, 0, 0).residue
    errs = (abs(z2 - math.pi ** 2 / 6), abs(z0 + 0.5), abs(zm1 + 1 / 12), abs(res - 1))
    dt = clk()
    ok = (r_ok and s_ok and errs[0] < 1e-8 and errs[1] < 1e-8 and errs[2] < 1e-6
          and errs[3] < 1e-6 and dt < 30)
    record(1, ok, f"r=1:{r_ok} S:{s_ok} errs={['%.1e' % e for e in errs]} {dt:.1f}s")
    assert ok


def test_criterion_02_bernoulli(record):
    clk = Clock()
    worst_c = worst_p = 0.0
    for b in (2, 3, 5):
        full = make_digit_set(range(b))
        c = c_coeffs(b, full, 12)
        for ell in range(13):
            target = (-1) ** ell * float(mpmath.bernoulli(ell))
            got = math.factorial(ell) * float(c[ell])
            err = abs(got - target) / abs(target) if target else abs(got)
            worst_c = max(worst_c, err)
        w = np.arange(256) / 256
        worst_p = max(worst_p, max(abs(P(b, full, x)) for x in w))
    dt = clk()
    ok = worst_c < 1e-10 and worst_p < 1e-10 and dt < 10
    record(2, ok, f"coeff err {worst_c:.1e}, max|P| {worst_p:.1e}, {dt:.1f}s")
    assert ok


def _random_system(rng):
    kind = rng.random()
    if kind < 0.6:
        base = geometric(rng.randint(2, 5))
    elif kind < 0.75:
        base = fibonacci()
    elif kind < 0.9:
        base = lucas()
    else:
        base = tau_floor(rng.choice(["3/2", "9/5", "5/2"]))
    extra = rng.sample(range(1, 9), rng.randint(1, 4))
    return base, make_digit_set([0] + extra)


def test_criterion_03_oracle_equivalence(record):
    clk = Clock()
    rng = random.Random(3)
    mismatches = 0
    for _ in range(200):
        base, digits = _random_system(rng)
        tab = rep_counts_integer(base, digits, 200)
        depth = next(k for k in range(64) if base.term(k) > 200)
        hist, _ = bruteforce_histogram(base, digits, depth, 200)
        brute = np.array([hist.get(Fraction(n), 0) for n in range(201)])
        mismatches += int(np.sum(brute != tab.counts))
    dt = clk()
    ok = mismatches == 0 and dt < 60
    record(3, ok, f"mismatches {mismatches}, {dt:.1f}s")
    assert ok


def test_criterion_04_pointwise_and_sandwich(record):
    clk = Clock()
    systems = [(2, BIN), (3, D013), (3, D015)]
    ratios = [verify_upper_bound(geometric(b), d, 10 ** 4).max_ratio for b, d in systems]
    sandwiches = [sandwich_check(b, d, 10 ** 4, samples=50, depth=14) for b, d in systems]
    dt = clk()
    ok = all(r <= 1 for r in ratios) and all(s.holds for s in sandwiches) and dt < 60
    margins = [(round(s.worst_lower_margin, 3), round(s.worst_upper_margin, 3)) for s in sandwiches]
    record(4, ok, f"max ratios {['%.3f' % r for r in ratios]}, sandwich margins {margins}, {dt:.1f}s")
    assert ok


def test_criterion_05_fourier(record):
    clk = Clock()
    g = geometric(3)
    prof = density_profile(g, D015, 12, 1024, with_bound=False)
    dft = np.fft.fft(prof.values()) / 1024
    dft_err = max(abs(psi_hat(3, D015, k) - dft[k % 1024]) for k in range(-8, 9))
    table = fourier_table(3, D015, 16)
    xs = np.arange(100) / 100
    approx = resum(xs, table, 16)
    exact = np.array([psi_scaling(g, D015, Fraction(i, 100), 12, with_bound=False).value for i in range(100)])
    resum_err = float(np.max(np.abs(approx - exact)))
    herm = max(abs(psi_hat_product_form(3, D015, -k) - psi_hat_product_form(3, D015, k).conjugate())
               for k in range(1, 4))
    dt = clk()
    parts = (dft_err < 1e-4, resum_err < 1e-3, herm < 1e-10, dt < 300)
    ok = all(parts)
    record(5, ok, f"dft {dft_err:.1e}, resum {resum_err:.1e} (needs 1e-3; truncation-limited), "
                  f"hermitian {herm:.1e}, {dt:.1f}s")
    assert ok


def test_criterion_06_continuation(record):
    clk = Clock()
    worst = 0.0
    for b, d in ((2, BIN), (3, D015)):
        sig = math.log(d.cardinality) / math.log(b)
        for t in np.linspace(-5, 5, 20):
            s = complex(sig + 0.5, t)
            worst = max(worst, abs(zeta_direct(geometric(b), d, s).value
                                   - zeta_continued_geometric(b, d, s).value))
    shift = 0.0
    rho = radius(3, D015).rho
    for s in (complex(0.3, 1.0), complex(-1.5, 2.0), complex(1.2, -0.5)):
        vals = [zeta_continued_geometric(3, D015, s, c_shift=c).value for c in (rho, rho + 1, rho + 2)]
        shift = max(shift, max(abs(v - vals[0]) for v in vals))
    ident = 0.0
    pairs = [(b, d, t) for b, d in ((2, BIN), (3, D015), (3, D013), (5, make_digit_set([0, 2, 7])))
             for t in (1.0, 0.5, 0.1, 0.01, 0.001)]
    for b, d, t in pairs:
        ident = max(ident, euler_maclaurin_identity_check(b, d, t).diff)
    dt = clk()
    ok = worst < 1e-6 and shift < 1e-8 and ident < 1e-10 and dt < 120
    record(6, ok, f"direct-vs-continued {worst:.1e}, c_shift {shift:.1e}, rho={rho} identity {ident:.1e} "
                  f"({len(pairs)} pairs), {dt:.1f}s")
    assert ok


def test_criterion_07_trivial_zeros(record):
    clk = Clock()
    d = make_digit_set([0, 1, 5])
    zs = [abs(zeta_continued_geometric(2, d, -n).value) for n in (1, 2, 3)]
    z0 = zeta_continued_geometric(2, d, 0).value
    dt = clk()
    ok = max(zs) < 1e-8 and abs(z0 + 1) < 1e-8 and dt < 30
    record(7, ok, f"|zeta(-n)| {['%.1e' % z for z in zs]}, zeta(0)+1 {abs(z0 + 1):.1e}, {dt:.1f}s")
    assert ok


def test_criterion_08_chow_slattery(record):
    clk = Clock()
    rep = chow_slattery_report("fibonacci", n_max=25)
    diffs = [abs(row[4]) for row in rep.log_average_rows if not math.isnan(row[4])]
    g = geometric(3)
    prof = density_profile(g, D015, 12, 512, with_bound=False)
    rhs = moment_rhs(3, D015, 1.0, 0.0, prof)
    lhs = moment_lhs(g, D015, 1.0, 0.0, 12)
    gap = abs(lhs - rhs) / abs(rhs)
    dt = clk()
    ok = diffs[-1] < 0.05 and gap < 0.05 and dt < 300
    record(8, ok, f"log-average first difference at n=25 {diffs[-1]:.1e}, k=1 gap {gap:.1e}, {dt:.1f}s")
    assert ok


def test_criterion_09_figure(record):
    clk = Clock()
    _, rows_a, _ = figure_panel("a")
    _, rows_b, _ = figure_panel("b")
    grid_ok = (len(rows_a) == len(rows_b) == 1001
               and abs(rows_a[0][0] - 8) < 1e-12 and abs(rows_a[-1][0] - 10) < 1e-12
               and abs(rows_b[0][0] - 6) < 1e-12 and abs(rows_b[-1][0] - 8) < 1e-12)
    positive = all(v > 0 for _, v in rows_a + rows_b)
    bound = 10 * depth_error_bound(geometric(3), D015, 8)
    period = max(abs(rows_a[k + 500][1] - rows_a[k][1]) for k in range(501))
    dt = clk()
    ok = grid_ok and positive and period < bound and dt < 300
    record(9, ok, f"grid {grid_ok}, positive {positive}, period gap {period:.1e} < {bound:.1e}, {dt:.1f}s")
    assert ok


def _quad_gamma(s: complex, w: float) -> complex:
    def f(t, part):
        v = cmath.exp((s - 1) * math.log(t) - t)
        return v.real if part == 0 else v.imag
    out = []
    for part in (0, 1):
        a, _ = integrate.quad(f, w, w + 60, args=(part,), limit=400, epsabs=0, epsrel=1e-12)
        b, _ = integrate.quad(f, w + 60, np.inf, args=(part,), limit=400, epsabs=0, epsrel=1e-12)
        out.append(a + b)
    return complex(*out)


def test_criterion_10_special_functions(record):
    clk = Clock()
    rng = np.random.default_rng(10)
    rec = 0.0
    for _ in range(100):
        s = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        g1, g = gamma_complex(s + 1), gamma_complex(s)
        rec = max(rec, abs(g1 - s * g) / abs(g1))
    quad = 0.0
    for _ in range(50):
        s = complex(rng.uniform(-4, 4), rng.uniform(-4, 4))
        w = float(rng.uniform(0.2, 15))
        ref = _quad_gamma(s, w)
        quad = max(quad, abs(upper_incomplete_gamma(s, w) - ref) / abs(ref))
    one = max(abs(upper_incomplete_gamma(1, w) - math.exp(-w)) for w in np.linspace(0.01, 30, 60))
    dt = clk()
    ok = rec < 1e-12 and quad < 1e-9 and one < 1e-12 and dt < 30
    record(10, ok, f"recurrence {rec:.1e}, incomplete vs quad {quad:.1e}, Gamma(1,w) {one:.1e}, {dt:.1f}s")
    assert ok
