"""The zeta function sum_lambda r(lambda) lambda^-s and its continuation.

Three evaluators:

* ``zeta_direct``: partial Dirichlet sum plus a tail correction built from
  the Fourier expansion of Psi (the tail of a sum that converges like
  X^(sigma - Re s) is otherwise far too large).
* ``zeta_continued_geometric``: the incomplete-Gamma / c(l) expansion,
  valid on the whole plane for b_k = beta^k.
* ``zeta_continued_perturbed``: the Mellin split at t = 1 for bases close
  to alpha beta^k, valid on Re s > sigma - gamma.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .analytic import P, c_coeffs, log_Z_excess, radius
from .core import (
    BaseSequence, DigitSet, NumerationError, as_fraction, geometric, log_card,
)
from .counting import rep_values
from .fourier import fourier_table, omega, psi_hat
from .special import (
    ConvergenceError, PoleError, as_complex, gl_nodes, loggamma,
    regularized_upper_gamma, rgamma,
)

POLE_RADIUS = 1e-6
LAMBDA_CUT = 40.0


@dataclass(frozen=True)
class ZetaEval:
    s: complex
    value: complex
    method: str
    truncations: dict = field(default_factory=dict)
    est_error: float = 0.0


@dataclass(frozen=True)
class PoleInfo:
    j: int
    k: int
    location: complex
    residue: complex
    removable_possible: bool = False


def _as_base(beta) -> BaseSequence:
    if isinstance(beta, BaseSequence):
        return beta
    return geometric(beta)


def _sigma(base: BaseSequence, digits: DigitSet) -> float:
    return log_card(base.param if base.param is not None else base.beta, digits)


# ------------------------------------------------------------ abscissa

@dataclass(frozen=True)
class AbscissaInfo:
    sigma_c: float
    boundary_divergent: bool
    partial_sums: tuple


def abscissa(base: BaseSequence, digits: DigitSet, H: int = 60) -> AbscissaInfo:
    """sigma_c = log_beta |d| with a probe of sum_h |d|^(h - log_beta b_h) at the boundary.

    The sum is flagged divergent when its terms do not decay (last term at
    least a tenth of the largest).
    """
    sig = _sigma(base, digits)
    card = digits.cardinality
    lb = math.log(base.beta)
    n = H + 1 if base.max_index() is None else min(H + 1, base.max_index() + 1)
    terms = []
    for h in range(n):
        bh = as_fraction(base.term(h))
        logb = (math.log(bh.numerator) - math.log(bh.denominator)) / lb
        terms.append(card ** (h - logb) if h - logb < 700 else math.inf)
    partial = tuple(np.cumsum(terms).tolist())
    divergent = terms[-1] >= 0.1 * max(terms)
    return AbscissaInfo(sig, bool(divergent), partial)


# -------------------------------------------------------------- direct

@lru_cache(maxsize=16)
def _rep_arrays(base: BaseSequence, digits: DigitSet, X) -> tuple:
    lam, r = rep_values(base, digits, X)
    lam_f = np.array([float(v) for v in lam])
    r_f = np.array([float(v) for v in r])
    return lam_f, r_f, int(sum(r)) + 1  # S(X), counting lambda = 0


def zeta_direct(base: BaseSequence, digits: DigitSet, s, X=10 ** 6, K: int = 32,
                tail: bool = True) -> ZetaEval:
    """sum over lambda <= X of r(lambda) lambda^-s, plus the tail estimate.

    The tail sum_{lambda > X} is -S(X) X^-s + s int_X^inf S(x) x^(-s-1) dx with
    S(x) replaced by (x/alpha)^sigma Psi(log_beta(x/alpha)) expanded in
    |k| <= K Fourier modes.  ``est_error`` bounds what that leaves out by
    C X^(sigma - Re s) (|s|/(Re s - sigma)) times the last retained mode, plus
    the remainder of S beyond its main term, crudely, from the table itself.
    """
    s = as_complex(s)
    sig = _sigma(base, digits)
    if s.real < sig + 0.2:
        raise ValueError(f"direct summation needs Re s >= {sig + 0.2:.6g}")
    lam, r, SX = _rep_arrays(base, digits, as_fraction(X))
    Xf = float(X)
    value = complex(np.sum(r * np.exp(-s * np.log(lam))))
    trunc = {"lambda_cut": Xf, "fourier_K": K if tail else 0}
    dist = s.real - sig
    if tail and base.alpha is not None:
        table = fourier_table(base if not base.is_geometric else base.param, digits, K)
        alpha = base.alpha
        om = omega(base.beta)
        lxa = math.log(Xf / alpha)
        corr = 0j
        for m in range(-K, K + 1):
            e = complex(sig, om * m) - s
            corr += table.entries[m] * cmath.exp(e * lxa) / (-e)
        corr = -SX * cmath.exp(-s * math.log(Xf)) + s * cmath.exp(-s * math.log(alpha)) * corr
        value += corr
        # dropped modes, assuming |Psi_hat(m)| <= |Psi_hat(K)| K/m beyond K
        err = 2 * abs(s) * (Xf / alpha) ** (-dist) * abs(table.entries[K]) / om
        err += Xf ** (-s.real) * (1 + abs(s) / s.real)
    else:
        # plain bound with C = max S(x)/x^sigma over the table
        C = float(np.max(np.cumsum(r) / lam ** sig)) * 1.1 + 1
        err = C * Xf ** (-dist) * (1 + abs(s) / dist)
    return ZetaEval(s, complex(value), "direct", trunc, float(err))


# --------------------------------------------------- continued (geometric)

@lru_cache(maxsize=64)
def _exp_p_nodes(beta: float, digits: DigitSet, n: int) -> tuple:
    x, w = gl_nodes(n)
    u = 0.5 * (x + 1)
    return u, 0.5 * w * np.exp(P(beta, digits, u))


def _exp_p_moment(beta: float, digits: DigitSet, g, tol: float = 1e-14, nmax: int = 1024) -> complex:
    """int_0^1 e^P(u) g(u) du by Gauss-Legendre with node doubling.

    Convergence is judged against the L1 norm of the integrand, since the
    integral itself may cancel to far below it.
    """
    n = 32
    u, w = _exp_p_nodes(beta, digits, n)
    vals = g(u)
    prev = complex(np.dot(w, vals))
    while True:
        n *= 2
        if n > nmax:
            raise ConvergenceError("Gauss-Legendre node cap exceeded in the l-sum", last=prev)
        u, w = _exp_p_nodes(beta, digits, n)
        vals = g(u)
        cur = complex(np.dot(w, vals))
        if abs(cur - prev) <= tol * max(float(np.dot(w, np.abs(vals))), 1e-300):
            return cur
        prev = cur


def _is_nonpositive_integer(s: complex) -> bool:
    return s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real)


def _pole_check(s: complex, sig: float, om: float, jmax: int) -> None:
    """Raise PoleError within POLE_RADIUS of a genuine pole sigma - j - i omega k."""
    j = round(sig - s.real)
    if j < 0 or j > jmax:
        return
    k = round(-s.imag / om)
    p = complex(sig - j, -om * k)
    if abs(s - p) < POLE_RADIUS:
        if k == 0 and _is_nonpositive_integer(complex(round(p.real), 0)) and abs(p.real - round(p.real)) < 1e-12:
            return  # 1/Gamma(s) vanishes there: the singularity is cancelled
        raise PoleError(f"s = {s} is within {POLE_RADIUS} of the pole {p}")


def _geometric_factor(a: complex, lb: float, c: int, u: np.ndarray) -> np.ndarray:
    """beta^(-a c) beta^(a u) / (beta^a - 1), arranged to avoid overflow."""
    x = a * lb
    if x.real > 0:
        return np.exp(x * (u - c - 1)) / (1 - cmath.exp(-x))
    return np.exp(x * (u - c)) / _expm1c(x)


def _expm1c(z: complex) -> complex:
    if abs(z) < 1e-5:
        return z * (1 + z / 2 + z * z / 6)
    return cmath.exp(z) - 1


def zeta_continued_geometric(beta, digits: DigitSet, s, c_shift: int | None = None,
                             tol: float = 1e-12, M: int = 160) -> ZetaEval:
    """Continuation for b_k = beta^k, valid for every s off the poles.

    zeta(s) = sum_lambda r(lambda) lambda^-s Q(s, lambda beta^-c) - beta^(-c s)/Gamma(s+1)
              + 1/Gamma(s) sum_l c(l) beta^(-a c) log(beta)/(beta^a - 1) int_0^1 e^P(u) beta^(a u) du,
    a = s + l - sigma, Q the regularized upper incomplete Gamma.
    """
    base = _as_base(beta)
    if not base.is_geometric:
        raise NumerationError("this continuation needs a geometric base")
    s = as_complex(s)
    b = base.beta
    lb = math.log(b)
    sig = _sigma(base, digits)
    om = omega(b)
    rho = radius(base.param, digits).rho
    c = rho if c_shift is None else int(c_shift)
    if c < rho:
        raise ValueError(f"c_shift must be at least rho = {rho}")
    _pole_check(s, sig, om, M)

    # (i) incomplete Gamma part over lambda <= LAMBDA_CUT beta^c
    cut = Fraction(int(LAMBDA_CUT)) * base.param ** c
    lam, r, _ = _rep_arrays(base, digits, cut)
    part1 = 0j
    bc = b ** (-c)
    for lv, rv in zip(lam, r):
        q = regularized_upper_gamma(s, lv * bc)
        if q != 0:
            part1 += rv * cmath.exp(-s * math.log(lv)) * q
    # (ii)
    part2 = -cmath.exp(-c * s * lb) * rgamma(s + 1)
    # (iii)
    cl = c_coeffs(base.param, digits, M).floats()
    rg = rgamma(s)
    part3 = 0j
    ell_cut = None
    small = 0
    est = 0.0
    if rg == 0:
        # s = -n: only the term with a = 0 survives, as the limit of (1/Gamma(s))/(beta^a - 1)
        n = int(-s.real)
        ell = n + sig
        if float(ell).is_integer() and int(ell) < len(cl):
            mean = _exp_p_moment(b, digits, lambda u: np.ones_like(u))
            part3 = (-1) ** n * math.factorial(n) * cl[int(ell)] * mean
        ell_cut = int(ell) if float(ell).is_integer() else 0
    else:
        for ell in range(len(cl)):
            if cl[ell] == 0.0:
                continue
            a = s + ell - sig
            term = cl[ell] * lb * _exp_p_moment(b, digits, lambda u, a=a: _geometric_factor(a, lb, c, u))
            part3 += term
            mag = abs(term * rg)
            scale = max(1.0, abs(part3 * rg))
            if ell >= 2 and mag < tol * scale:
                small += 1
                if small >= 3:
                    ell_cut = ell
                    est = mag
                    break
            else:
                small = 0
        else:
            raise ConvergenceError("l-sum did not reach tolerance; raise M", M=M, last=abs(term))
        part3 *= rg
    value = part1 + part2 + part3
    trunc = {"lambda_cut": float(cut), "ell_cut": ell_cut, "c_shift": c}
    return ZetaEval(s, complex(value), "continued_geometric", trunc, float(est + 1e-15 * abs(value)))


# ------------------------------------------------------------ residues

def pole_location(beta, digits: DigitSet, j: int, k: int) -> complex:
    base = _as_base(beta)
    return complex(_sigma(base, digits) - j, -omega(base.beta) * k)


def residue(beta, digits: DigitSet, j: int, k: int) -> PoleInfo:
    """Residue at sigma - j - i omega k.

    From the continuation formula the residue is
    c(j) Gamma(1 + sigma - i omega k) Psi_hat(-k) / Gamma(p); for j = 0 this
    is p Psi_hat(-k).  Where 1/Gamma(p) = 0 the residue is 0 (no pole).
    """
    if j < 0:
        raise ValueError("j must be non-negative")
    base = _as_base(beta)
    sig = _sigma(base, digits)
    om = omega(base.beta)
    p = complex(sig - j, -om * k)
    cj = c_coeffs(base.param, digits, max(j, 1)).floats()[j]
    if cj == 0.0 or _is_nonpositive_integer(p):
        return PoleInfo(j, k, p, 0j, True)
    ph = psi_hat(base.param, digits, -k)
    res = cj * cmath.exp(loggamma(complex(1 + sig, -om * k)) - loggamma(p)) * ph
    return PoleInfo(j, k, p, complex(res), bool(abs(res) < 1e-14))


def pole_grid(beta, digits: DigitSet, j_max: int, k_max: int) -> list[PoleInfo]:
    return [residue(beta, digits, j, k) for j in range(j_max + 1) for k in range(-k_max, k_max + 1)]


def special_value(beta, digits: DigitSet, n: int) -> float:
    """zeta(-n) from the closed form; c at a non-integer index counts as 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    base = _as_base(beta)
    sig = _sigma(base, digits)
    val = -1.0 if n == 0 else 0.0
    if float(sig).is_integer():
        m = n + int(sig)
        cm = c_coeffs(base.param, digits, max(m, 1)).floats()[m]
        mean = _exp_p_moment(base.beta, digits, lambda u: np.ones_like(u))
        val += (-1) ** n * math.factorial(n) * cm * mean.real
    return val


# --------------------------------------------------- continued (perturbed)

_V_MAX = 600.0


def _b_integral(base: BaseSequence, digits: DigitSet, s: complex, sig: float,
                panel: float, nodes: int) -> complex:
    """int_0^1 e^P(log_b t) expm1(D(t)) t^(s-1-sigma) dt with t = e^-v, v <= 600."""
    lb = math.log(base.beta)
    x, w = gl_nodes(nodes)
    edges = np.arange(0.0, _V_MAX + panel / 2, panel)
    a, bnd = edges[:-1], edges[1:]
    half = 0.5 * (bnd - a)
    v = (a[:, None] + half[:, None] * (x[None, :] + 1)).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    total = 0j
    for i in range(0, v.size, 4096):
        vv = v[i:i + 4096]
        t = np.exp(-vv)
        d = log_Z_excess(base, digits, t)
        f = np.exp(P(base.beta, digits, -vv / lb)) * np.expm1(d)
        total += complex(np.dot(wt[i:i + 4096], f * np.exp(-(s - sig) * vv)))
    return total


def zeta_continued_perturbed(base: BaseSequence, digits: DigitSet, s, tol: float = 1e-10) -> ZetaEval:
    """Continuation to Re s > sigma - gamma for b_k = alpha beta^k + O(beta^((1-gamma)k)).

    With b'_k = b_k/alpha, zeta_b(s) = alpha^-s zeta_b'(s) and
    zeta_b'(s) = -1/Gamma(s+1) + log(beta)/(beta^(s-sigma) - 1) int_0^1 e^P beta^((s-sigma)u) du / Gamma(s)
                 + h(s)/Gamma(s),
    h(s) = sum_{lambda' <= 40} r lambda'^-s Gamma(s, lambda') + int_0^1 e^P expm1(D) t^(s-1-sigma) dt.
    The t-integral is done on panels in v = -log t and refined until stable.
    """
    if base.alpha is None or base.gamma is None:
        raise NumerationError(f"{base.label()} needs declared alpha and gamma")
    s = as_complex(s)
    sig = _sigma(base, digits)
    gamma = base.gamma
    if s.real <= sig - gamma + 0.05:
        raise ValueError(f"needs Re s > {sig - gamma + 0.05:.6g}")
    b = base.beta
    lb = math.log(b)
    om = omega(b)
    a0 = s - sig
    k = round(-a0.imag / om)
    if abs(a0 + 1j * om * k) < POLE_RADIUS:
        raise PoleError(f"s = {s} is within {POLE_RADIUS} of the pole {complex(sig, -om * k)}")
    alpha = base.alpha
    lam, r, _ = _rep_arrays(base, digits, as_fraction(LAMBDA_CUT * alpha))
    h_sum = 0j
    for lv, rv in zip(lam, r):
        lp = lv / alpha
        h_sum += rv * cmath.exp(-s * math.log(lp)) * regularized_upper_gamma(s, lp)
    main = lb * _exp_p_moment(b, digits, lambda u: _geometric_factor(a0, lb, 0, u))
    rg = rgamma(s)
    panel = min(lb, 1.0) / 2
    prev = _b_integral(base, digits, s, sig, panel, 16)
    cur = _b_integral(base, digits, s, sig, panel, 24)
    if abs(cur - prev) > max(tol, 1e-8) * max(1.0, abs(cur)):
        cur2 = _b_integral(base, digits, s, sig, panel / 2, 24)
        if abs(cur2 - cur) > max(tol, 1e-8) * max(1.0, abs(cur2)) * 10:
            raise ConvergenceError("B-integral did not settle", last=cur2, prev=cur)
        prev, cur = cur, cur2
    value = -rgamma(s + 1) + rg * main + h_sum + rg * cur
    value *= cmath.exp(-s * math.log(alpha))
    err = abs(rg) * abs(cur - prev) + 1e-14 * abs(value)
    trunc = {"lambda_cut": LAMBDA_CUT, "v_max": _V_MAX, "panel": panel}
    return ZetaEval(s, complex(value), "continued_perturbed", trunc, float(err))
