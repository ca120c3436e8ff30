"""L, the periodic function P, the coefficients c(l), Z and the remainder B.

Conventions: sigma = log_beta |d| throughout, and ``Z(base, digits, t)``
means the generating function evaluated at e^-t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath
import numpy as np

from .core import BaseSequence, DigitSet, NumerationError, as_fraction, beta_float, log_card, mp_from_fraction


@dataclass(frozen=True)
class PowerSeries:
    coeffs: tuple
    truncation_degree: int

    def floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __getitem__(self, i):
        return self.coeffs[i]

    def __len__(self):
        return len(self.coeffs)


@dataclass(frozen=True)
class RadiusInfo:
    sigma_est: float
    rho: int


# ------------------------------------------------------------------- L

def _dz(digits: DigitSet) -> np.ndarray:
    return np.array([float(d) for d in digits.nonzero])


def L(digits: DigitSet, y):
    """log sum_d e^(-d y) for y >= 0 (vectorised)."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("L is used for y >= 0")
    dz = _dz(digits)
    s = np.exp(-np.multiply.outer(y, dz)).sum(axis=-1)
    return np.log1p(s)


def L_minus_log(digits: DigitSet, y):
    """L(y) - log|d|, accurate for small y."""
    y = np.asarray(y, dtype=float)
    dz = _dz(digits)
    m = np.expm1(-np.multiply.outer(y, dz)).sum(axis=-1) / digits.cardinality
    return np.log1p(m)


# ------------------------------------------------------- formal series

def _series_log1p(a: list) -> list:
    """Coefficients of log(1 + A(y)) where a[0] == 0."""
    n = len(a)
    g = [Fraction(0)] * n
    for m in range(1, n):
        acc = m * a[m]
        for k in range(1, m):
            acc -= k * g[k] * a[m - k]
        g[m] = acc / m
    return g


def _series_exp(f: list) -> list:
    """Coefficients of exp(F(t)) where f[0] == 0."""
    n = len(f)
    g = [Fraction(0)] * n
    g[0] = Fraction(1) if isinstance(f[0], Fraction) else 1.0
    for m in range(1, n):
        acc = 0
        for k in range(1, m + 1):
            acc += k * f[k] * g[m - k]
        g[m] = acc / m
    return g


@lru_cache(maxsize=64)
def _L_coeffs_exact(values: tuple, M: int) -> tuple:
    card = len(values)
    a = [Fraction(0)] * (M + 1)
    for n in range(1, M + 1):
        a[n] = Fraction(sum((-d) ** n for d in values), card * factorial(n))
    return tuple(_series_log1p(a))


def L_coeffs(digits: DigitSet, M: int) -> PowerSeries:
    """Maclaurin coefficients of L up to degree M; [y^0] = log|d| as a float, the rest exact."""
    if M < 1:
        raise ValueError("M must be at least 1")
    g = list(_L_coeffs_exact(digits.values, M))
    g[0] = math.log(digits.cardinality)
    return PowerSeries(tuple(g), M)


def _beta_key(beta):
    if isinstance(beta, (Fraction, int, str)):
        return as_fraction(beta)
    return float(beta)


def _partitions(m: int, largest: int | None = None):
    if largest is None:
        largest = m
    if m == 0:
        yield []
        return
    for p in range(min(m, largest), 0, -1):
        for rest in _partitions(m - p, p):
            yield [p] + rest


@lru_cache(maxsize=64)
def _c_coeffs_cached(bkey, values: tuple, M: int) -> tuple:
    Lc = _L_coeffs_exact(values, max(M, 1))
    exact = isinstance(bkey, Fraction)
    f = [Fraction(0) if exact else 0.0]
    for h in range(1, M + 1):
        if exact:
            f.append(Lc[h] / (1 - bkey ** h))
        else:
            f.append(float(Lc[h]) / (1 - bkey ** h))
    if M == 0:
        return (Fraction(1) if exact else 1.0,)
    g = _series_exp(f)
    # second route: the partition sum, only for small orders
    for m in range(1, min(M, 8) + 1):
        tot = 0
        for part in _partitions(m):
            term = Fraction(1) if exact else 1.0
            for h in set(part):
                lh = part.count(h)
                term = term * f[h] ** lh / factorial(lh)
            tot += term
        ref = g[m]
        if exact:
            ok = tot == ref
        else:
            ok = abs(tot - ref) <= 1e-12 * max(abs(ref), 1e-300)
        if not ok:
            raise ArithmeticError(f"c({m}) disagrees between the two routes")
    return tuple(g)


def c_coeffs(beta, digits: DigitSet, M: int) -> PowerSeries:
    """c(0..M): coefficients of prod_{k>=1} |d| / sum_d exp(-d beta^-k t).

    Exact Fractions when beta is rational (int, Fraction or str); floats otherwise.
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    return PowerSeries(_c_coeffs_cached(_beta_key(beta), digits.values, M), M)


def c_partition_sum(beta, digits: DigitSet, m: int):
    """c(m) from the explicit sum over partitions of m (independent route)."""
    bkey = _beta_key(beta)
    Lc = _L_coeffs_exact(digits.values, max(m, 1))
    tot = 0
    for part in _partitions(m):
        term = Fraction(1)
        for h in set(part):
            lh = part.count(h)
            fh = Lc[h] / (1 - bkey ** h) if isinstance(bkey, Fraction) else float(Lc[h]) / (1 - bkey ** h)
            term = term * fh ** lh / factorial(lh)
        tot += term
    return tot


def radius(beta, digits: DigitSet, M: int = 40) -> RadiusInfo:
    """Root-test estimate of the radius of the c-series and the shift rho."""
    if M < 20:
        raise ValueError("M must be at least 20")
    c = c_coeffs(beta, digits, M)
    best = 0.0
    for l in range(M // 2, M + 1):
        v = abs(float(c[l]))
        if v > 0:
            best = max(best, v ** (1.0 / l))
    if best == 0.0:
        return RadiusInfo(math.inf, 0)
    sig = 1.0 / best
    b = beta_float(beta)
    rho = 0
    # halve the estimate before comparing, the root test is only a proxy
    while b ** (-rho) >= sig / 2:
        rho += 1
    return RadiusInfo(sig, rho)


# -------------------------------------------------------------------- P

def _p_kmax(beta: float, digits: DigitSet, tol: float) -> int:
    # upper tail: L(beta^(k+w)) ~ (|d|-1) exp(-dmin beta^k) decays double-exponentially
    dmin = float(digits.min_nonzero)
    y = math.log(10 * digits.cardinality * 40 / tol) / dmin
    return int(math.ceil(math.log(max(y, 1.0)) / math.log(beta))) + 2


def _p_kmin(beta: float, digits: DigitSet, tol: float) -> int:
    # lower tail: |k| beta^k max(d) < tol/10
    dmax = float(digits.max_digit)
    k = -1
    while abs(k) * beta ** (k + 1) * dmax * 2 >= tol / 10:
        k -= 1
    return k


def P(beta, digits: DigitSet, w, tol: float = 1e-15):
    """P_{beta,d}(w) from its defining two-sided series (vectorised in w)."""
    b = beta_float(beta)
    w = np.asarray(w, dtype=float)
    wf = w - np.floor(w)  # period 1
    kmin = _p_kmin(b, digits, tol)
    kmax = _p_kmax(b, digits, tol)
    ks = np.arange(kmin, kmax + 1, dtype=float)
    y = b ** (np.add.outer(wf, ks))
    # differences of L with the log|d| offset removed on the small side
    small = y < 1.0
    M0 = np.where(small, L_minus_log(digits, np.where(small, y, 0.0)), 0.0)
    L0 = np.where(small, 0.0, L(digits, np.where(small, 1.0, y)))
    y1 = y * b
    small1 = y1 < 1.0
    M1 = np.where(small1, L_minus_log(digits, np.where(small1, y1, 0.0)), 0.0)
    L1 = np.where(small1, 0.0, L(digits, np.where(small1, 1.0, y1)))
    logd = math.log(digits.cardinality)
    # (L0 - L1) with each side written as M + log|d| or as L
    diff = (M0 - M1) + (L0 - L1) + logd * (small.astype(float) - small1.astype(float))
    coef = np.add.outer(wf, ks) + 0.5
    terms = coef * diff
    out = terms.sum(axis=-1) + 0.5 * logd
    return float(out) if out.ndim == 0 else out


def P_telescoped(beta, digits: DigitSet, w):
    """w log|d| + sum_k (L(beta^(k+w)) - 1_{k<0} log|d|): the same function, summed differently."""
    b = beta_float(beta)
    w = float(w)
    logd = math.log(digits.cardinality)
    tot = w * logd
    k = 0
    while True:
        v = float(L(digits, b ** (k + w)))
        tot += v
        if v < 1e-18:
            break
        k += 1
    k = -1
    while True:
        v = float(L_minus_log(digits, b ** (k + w)))
        tot += v
        if abs(v) < 1e-18:
            break
        k -= 1
    return tot


def _mp_L_minus_log(dz, card, y):
    return mpmath.log1p(mpmath.fsum(mpmath.expm1(-d * y) for d in dz) / card)


def _mp_L(dz, y):
    return mpmath.log1p(mpmath.fsum(mpmath.exp(-d * y) for d in dz))


class PMP:
    """P evaluated in mpmath at the working precision fixed at construction."""

    def __init__(self, beta_mp_fn, digits: DigitSet, dps: int, k_direct: int = 30):
        self.dps = dps
        self.digits = digits
        self.k_direct = k_direct
        with mpmath.workdps(dps):
            self.beta = beta_mp_fn()
            self.dz = [mp_from_fraction(d) for d in digits.nonzero]
            self.card = digits.cardinality
            self.logd = mpmath.log(self.card)
            # tail sum_{k > k_direct} (L(beta^-k y) - log|d|) = sum_h L_h y^h beta^(-h k_direct)/(beta^h - 1)
            H = 4
            while float(self.beta) ** (-H * k_direct) * 8.0 ** H > mpmath.mpf(10) ** (-dps - 5) and H < 400:
                H += 4
            Lc = _L_coeffs_exact(digits.values, H)
            self.tail = [mp_from_fraction(Lc[h]) * self.beta ** (-h * k_direct) / (self.beta ** h - 1)
                         for h in range(1, H + 1)]

    def __call__(self, w):
        with mpmath.workdps(self.dps):
            w = mpmath.mpf(w)
            y = self.beta ** w
            tot = w * self.logd
            eps = mpmath.mpf(10) ** (-self.dps - 5)
            k = 0
            yk = y
            while True:
                v = _mp_L(self.dz, yk)
                tot += v
                if v < eps:
                    break
                k += 1
                yk *= self.beta
            yk = y
            for _ in range(self.k_direct):
                yk /= self.beta
                tot += _mp_L_minus_log(self.dz, self.card, yk)
            p = mpmath.mpf(1)
            tail = mpmath.mpf(0)
            for c in self.tail:
                p *= y
                tail += c * p
            return tot + tail


def p_mp(beta_mp_fn, digits: DigitSet, w, dps: int = 30):
    return PMP(beta_mp_fn, digits, dps)(w)


# ------------------------------------------------------------------- Z

def _log_Z(base: BaseSequence, digits: DigitSet, t: float, scale: float = 1.0) -> float:
    """sum_k L(t b_k / scale), stopping once the factors are 1 to within 1e-17."""
    tot = 0.0
    k = 0
    last = base.max_index()
    while True:
        if last is not None and k > last:
            break
        y = t * float(base.term(k)) / scale
        v = float(L(digits, y))
        tot += v
        if v < 1e-17 and y > 1:
            break
        k += 1
    return tot


def Z(base: BaseSequence, digits: DigitSet, t: float, K: int | None = None) -> float:
    """Generating function sum_lambda r(lambda) e^(-lambda t) as the product over k."""
    if t <= 0:
        raise ValueError("t must be positive")
    if K is not None:
        return math.exp(sum(float(L(digits, t * float(base.term(k)))) for k in range(K)))
    return math.exp(_log_Z(base, digits, t))


@dataclass(frozen=True)
class IdentityReport:
    t: float
    lhs: float
    rhs: float
    diff: float


def euler_maclaurin_identity_check(beta, digits: DigitSet, t: float) -> IdentityReport:
    """Both sides of sum_k L(beta^k t) = -log_b(t) log|d| + P(log_b t) + sum_k>=1 (log|d| - L(beta^-k t))."""
    b = beta_float(beta)
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    lhs = 0.0
    k = 0
    while True:
        v = float(L(digits, b ** k * t))
        lhs += v
        if v < 1e-18:
            break
        k += 1
    w = math.log(t) / math.log(b)
    rhs = -w * math.log(digits.cardinality) + P(b, digits, w)
    k = 1
    while True:
        v = -float(L_minus_log(digits, b ** (-k) * t))
        rhs += v
        if abs(v) < 1e-18:
            break
        k += 1
    return IdentityReport(t, lhs, rhs, abs(lhs - rhs))


# ------------------------------------------------------------------- B

@lru_cache(maxsize=32)
def _deviations(base: BaseSequence, n: int) -> np.ndarray:
    return np.array([base.deviation(k) for k in range(n)])


def _require_alpha_gamma(base: BaseSequence) -> tuple[float, float]:
    if base.alpha is None or base.gamma is None:
        raise NumerationError(f"{base.label()} has no declared alpha/gamma")
    return base.alpha, base.gamma


def log_Z_excess(base: BaseSequence, digits: DigitSet, t) -> np.ndarray:
    """D(t) = log Z(e^(-t/alpha)) - P(log_b t) + sigma log t, without cancellation.

    The geometric part telescopes into sum_k>=1 -M(beta^-k t); the perturbation
    enters through L(t b_k/alpha) - L(t beta^k), written as log1p of a
    weighted expm1 of the exact deviation b_k/alpha - beta^k.
    """
    _require_alpha_gamma(base)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    b = base.beta
    dz = _dz(digits)
    dmin = float(digits.min_nonzero)
    # geometric remainder
    kk = np.arange(1, int(math.ceil(60 / math.log10(b))) + 2)
    geo = -L_minus_log(digits, np.multiply.outer(t, b ** (-kk.astype(float)))).sum(axis=-1)
    if base.is_geometric:
        return geo
    # perturbation: k until t beta^k dmin > 750
    kmax = int(math.ceil(math.log(750.0 / (dmin * t.min())) / math.log(b))) + 2
    dev = _deviations(base, -(-kmax // 128) * 128)[:kmax]
    ks = np.arange(kmax, dtype=float)
    y = np.multiply.outer(t, b ** ks)            # t beta^k
    eps = np.multiply.outer(t, dev)              # t (b_k/alpha - beta^k)
    wts = np.exp(-y[..., None] * dz)             # e^(-d y), d != 0
    num = (wts * np.expm1(-eps[..., None] * dz)).sum(axis=-1)
    den = 1.0 + wts.sum(axis=-1)
    pert = np.log1p(num / den).sum(axis=-1)
    return geo + pert


def B_fn(base: BaseSequence, digits: DigitSet, t):
    """B(t) = (Z(e^(-t/alpha)) - e^P(log_b t) t^-sigma) t^(sigma - min(1, gamma))."""
    _, gamma = _require_alpha_gamma(base)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr <= 0) or np.any(t_arr > 1):
        raise ValueError("t must lie in (0, 1]")
    w = np.log(t_arr) / math.log(base.beta)
    out = np.exp(P(base.beta, digits, w)) * np.expm1(log_Z_excess(base, digits, t_arr)) * t_arr ** (-min(1.0, gamma))
    return float(out[0]) if np.ndim(t) == 0 else out


def B_fn_direct(base: BaseSequence, digits: DigitSet, t: float) -> float:
    """Plain difference of the two sides (loses digits as t -> 0; oracle only)."""
    alpha, gamma = _require_alpha_gamma(base)
    sig = log_card(base.beta, digits)
    z = math.exp(_log_Z(base, digits, t, scale=alpha))
    main = math.exp(P(base.beta, digits, math.log(t) / math.log(base.beta))) * t ** (-sig)
    return (z - main) * t ** (sig - min(1.0, gamma))


def mean_exp_P(beta, digits: DigitSet, n: int = 256) -> float:
    """int_0^1 e^P(u) du by the periodic trapezoid rule."""
    u = np.arange(n) / n
    return float(np.exp(P(beta, digits, u)).mean())
