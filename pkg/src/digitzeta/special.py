"""Complex Gamma, incomplete Gamma, Gauss-Legendre quadrature and the DFT.

Everything here works in double precision on Python complex numbers.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np


class PoleError(ArithmeticError):
    """Evaluation at (or too close to) a pole."""


class ConvergenceError(RuntimeError):
    """An iteration ran out of steps; ``info`` carries the last state."""

    def __init__(self, msg: str, **info):
        super().__init__(msg)
        self.info = info


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    nodes_used: int
    est_error: float


def as_complex(s) -> complex:
    z = complex(s)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite complex value {s!r}")
    return z


# Lanczos, g = 7, nine terms
_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def _sinpi(z: complex) -> complex:
    # reduce first so integers give exact zeros
    n = round(z.real)
    r = complex(z.real - n, z.imag)
    v = cmath.sin(math.pi * r)
    return -v if n % 2 else v


def _loggamma_right(z: complex) -> complex:
    """log Gamma(z) for Re z >= 0.5."""
    z = z - 1
    x = _LANCZOS[0]
    for i in range(1, 9):
        x += _LANCZOS[i] / (z + i)
    t = z + _G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def _log_sinpi(z: complex) -> complex:
    # log sin(pi z) without overflow for large |Im z|
    if abs(z.imag) < 20:
        return cmath.log(_sinpi(z))
    sgn = 1 if z.imag > 0 else -1
    # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i ; keep the dominant exponential
    dom = -sgn * 1j * math.pi * z
    rest = 1 - cmath.exp(2 * sgn * 1j * math.pi * z)
    return dom + cmath.log(rest) - cmath.log(2j * -sgn)


def loggamma(s) -> complex:
    """log Gamma(s) (some branch); useful when Gamma itself under- or overflows."""
    z = as_complex(s)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real >= 0.5:
        return _loggamma_right(z)
    return math.log(math.pi) - _log_sinpi(z) - _loggamma_right(1 - z)


def gamma_complex(s) -> complex:
    z = as_complex(s)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        return cmath.exp(_loggamma_right(z))
    return math.pi / (_sinpi(z) * cmath.exp(_loggamma_right(1 - z)))


def rgamma(s) -> complex:
    """1/Gamma(s), entire; exactly 0 at the non-positive integers."""
    z = as_complex(s)
    if _is_nonpositive_integer(z):
        return 0j
    if z.real >= 0.5:
        return cmath.exp(-_loggamma_right(z))
    return _sinpi(z) * cmath.exp(_loggamma_right(1 - z)) / math.pi


# ------------------------------------------------------- incomplete Gamma

_EULER = 0.57721566490153286061


@lru_cache(maxsize=None)
def _zeta_table(n: int = 60) -> tuple[float, ...]:
    import mpmath
    return tuple(float(mpmath.zeta(k)) for k in range(2, n))


def _gamma1p_m1_over(e: complex) -> complex:
    """(Gamma(1+e) - 1)/e for |e| <= 0.5, from the Taylor series of log Gamma(1+e)."""
    if e == 0:
        return complex(-_EULER)
    zt = _zeta_table()
    lg = -_EULER * e
    p = -e
    for k, zk in enumerate(zt, start=2):
        p *= -e
        term = zk * p / k
        lg += term
        if abs(term) < 1e-18 * max(abs(lg), 1e-300):
            break
    # expm1(lg)/e with a series when lg is tiny
    if abs(lg) < 1e-5:
        return lg / e * (1 + lg / 2 + lg * lg / 6)
    return (cmath.exp(lg) - 1) / e


def _expm1_over(a: complex, e: complex) -> complex:
    """(exp(a e) - 1)/e, continuous at e = 0."""
    x = a * e
    if abs(x) < 1e-5:
        return a * (1 + x / 2 + x * x / 6)
    return (cmath.exp(x) - 1) / e


def _upper_near_zero(e: complex, w: float) -> complex:
    """Gamma(e, w) for |e| <= 0.5 (covers e = 0, where it is E1(w))."""
    lw = math.log(w)
    head = _gamma1p_m1_over(e) - _expm1_over(lw, e)
    acc = 0j
    term = 1.0
    n = 0
    while True:
        n += 1
        term *= -w / n
        t = term / (n + e)
        acc += t
        if abs(t) < 1e-17 * max(abs(acc), 1e-300) and n > w:
            break
        if n > 500:
            raise ConvergenceError("E1-type series did not converge", s=e, w=w)
    return head - cmath.exp(e * lw) * acc


def _lower_star_sum(s: complex, w: float, max_iter: int = 2000) -> complex:
    """sum_n w^n / Gamma(s+n+1)."""
    r = rgamma(s + 1)
    if r == 0:
        # s+1 = -m: the terms with n <= m vanish, start at n = m+1
        m = int(-(s.real + 1))
        term = w ** (m + 1) * rgamma(s + m + 2)
        total = term
        n = m + 1
    else:
        term = r
        total = term
        n = 0
    while True:
        n += 1
        term = term * w / (s + n)
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and n > abs(s) + w:
            return total
        if n > max_iter:
            raise ConvergenceError("series for Gamma(s,w) did not converge", s=s, w=w, n=n)


def _upper_cf(s: complex, w: float, max_iter: int = 2000) -> complex:
    """Gamma(s, w) by the Legendre continued fraction (modified Lentz)."""
    tiny = 1e-300
    b = w + 1 - s
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, max_iter + 1):
        an = -i * (i - s)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < 1e-16:
            return cmath.exp(-w + s * math.log(w)) * h
    raise ConvergenceError("continued fraction for Gamma(s,w) did not converge", s=s, w=w, n=max_iter)


def use_continued_fraction(s: complex, w: float) -> bool:
    """Switching rule for Gamma(s, w).

    The continued fraction is used once w >= |s| + 2.  For Re s < 1/2 it is
    also used from w >= 3 on: there the power series cancels badly while the
    fraction still converges to full accuracy.
    """
    return w >= abs(s) + 2 or (s.real < 0.5 and w >= 3)


def upper_incomplete_gamma(s, w: float) -> complex:
    """Gamma(s, w) = int_w^inf e^-u u^(s-1) du for w > 0 (w = 0 gives Gamma(s))."""
    z = as_complex(s)
    w = float(w)
    if w < 0:
        raise ValueError("w must be non-negative")
    if w == 0:
        return gamma_complex(z)
    if use_continued_fraction(z, w):
        return _upper_cf(z, w)
    if z.real < 0.5:
        m = max(0, round(-z.real))
        e = z + m
        if abs(e) <= 0.5:
            # start next to the pole and recur downward: G(a-1,w) = (G(a,w) - w^(a-1) e^-w)/(a-1)
            g = _upper_near_zero(e, w)
            a = e
            for _ in range(m):
                g = (g - cmath.exp((a - 1) * math.log(w) - w)) / (a - 1)
                a -= 1
            return g
    return gamma_complex(z) * regularized_upper_gamma(z, w)


def regularized_upper_gamma(s, w: float) -> complex:
    """Q(s, w) = Gamma(s, w)/Gamma(s); entire in s, 0 at non-positive integers."""
    z = as_complex(s)
    w = float(w)
    if w <= 0:
        if w == 0:
            return 0j if _is_nonpositive_integer(z) else 1 + 0j
        raise ValueError("w must be non-negative")
    if _is_nonpositive_integer(z):
        return 0j
    if use_continued_fraction(z, w):
        r = rgamma(z)
        return 0j if r == 0 else r * _upper_cf(z, w)
    return 1 - cmath.exp(z * math.log(w) - w) * _lower_star_sum(z, w)


def lower_incomplete_gamma(s, w: float) -> complex:
    """gamma(s, w) = Gamma(s) - Gamma(s, w), from its own power series."""
    z = as_complex(s)
    if _is_nonpositive_integer(z):
        raise PoleError("lower incomplete Gamma has a pole here")
    return gamma_complex(z) * cmath.exp(z * math.log(w) - w) * _lower_star_sum(z, float(w))


# ----------------------------------------------------------- quadrature

@lru_cache(maxsize=32)
def gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, wt = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    wt.setflags(write=False)
    return x, wt


def gl_fixed(f: Callable, a: float, b: float, n: int) -> complex:
    x, wt = gl_nodes(n)
    half = 0.5 * (b - a)
    u = a + half * (x + 1)
    return complex(half * np.dot(wt, f(u)))


def gl_integrate(f: Callable, a: float = 0.0, b: float = 1.0, tol: float = 1e-12,
                 n0: int = 8, nmax: int = 2048) -> QuadratureResult:
    """Gauss-Legendre with node doubling until successive values differ by < tol.

    ``f`` takes an array of nodes and returns an array of (complex) values.
    """
    n = n0
    prev = gl_fixed(f, a, b, n)
    used = n
    while True:
        n *= 2
        if n > nmax:
            raise ConvergenceError("Gauss-Legendre node cap exceeded", nodes=used, last=prev)
        cur = gl_fixed(f, a, b, n)
        used += n
        err = abs(cur - prev)
        if err < tol:
            return QuadratureResult(cur, used, err)
        prev = cur


def dft(samples) -> np.ndarray:
    """c_k = (1/N) sum_j samples[j] e^(-2 pi i k j / N); index -k sits at N-k."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("dft of an empty sample list")
    return np.fft.fft(arr) / arr.size
