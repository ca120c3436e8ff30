"""Fourier coefficients of the relative density Psi.

Psi_hat(k) = [int_0^1 e^P(w) e^(2 pi i k w) dw] / Gamma(1 + sigma + i omega k),
omega = 2 pi / log beta.  The Gamma factor decays like exp(-pi omega |k| / 2),
so the integral is just as small and has to be computed with that many
extra digits.  It is done in mpmath with the periodic trapezoid rule, which
converges geometrically for the analytic periodic integrand e^P.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .analytic import L, PMP
from .core import BaseSequence, DigitSet, beta_float, geometric, log_card
from .special import ConvergenceError, gl_integrate, loggamma


@dataclass(frozen=True)
class FourierTable:
    beta: float
    digits: DigitSet
    entries: dict
    tol: float

    @property
    def K(self) -> int:
        return max(abs(k) for k in self.entries)

    def coefficient(self, k: int) -> complex:
        return self.entries[k]


def omega(beta) -> float:
    return 2 * math.pi / math.log(beta_float(beta))


def _working_dps(beta: float, K: int, tol: float) -> int:
    return int(math.ceil(-math.log10(tol) + math.pi * omega(beta) * K / (2 * math.log(10)))) + 25


def _psi_hat_mp(beta_mp_fn, digits: DigitSet, sigma, K: int, N: int, dps: int) -> list:
    """Psi_hat(0..K) with N trapezoid nodes; also returns the raw e^P coefficients."""
    pm = PMP(beta_mp_fn, digits, dps)
    with mpmath.workdps(dps):
        f = [mpmath.exp(pm(mpmath.mpf(j) / N)) for j in range(N)]
        om = 2 * mpmath.pi / mpmath.log(beta_mp_fn())
        sig = mpmath.mpf(sigma)
        raw, psi = [], []
        for k in range(K + 1):
            acc = mpmath.mpc(0)
            for j in range(N):
                acc += f[j] * mpmath.expjpi(mpmath.mpf(2 * k * j) / N)
            acc /= N
            raw.append(acc)
            psi.append(acc * mpmath.exp(-mpmath.loggamma(mpmath.mpc(1 + sig, om * k))))
        return raw, psi


@lru_cache(maxsize=32)
def _coefficients(beta_key, digits: DigitSet, K: int, tol: float) -> tuple:
    beta_mp_fn = _beta_fn(beta_key)
    b = beta_float(beta_key)
    sig = _sigma(beta_key, digits)
    dps = _working_dps(b, K, tol)
    N = 2 * K + 32
    _, prev = _psi_hat_mp(beta_mp_fn, digits, sig, K, N, dps)
    err = math.inf
    for _ in range(6):
        N *= 2
        raw, cur = _psi_hat_mp(beta_mp_fn, digits, sig, K, N, dps)
        err = max(abs(complex(a - c)) for a, c in zip(prev, cur))
        if err < tol / 10:
            return tuple(raw), tuple(complex(c) for c in cur)
        prev = cur
    raise ConvergenceError("trapezoid rule for the e^P coefficients did not settle", err=err, N=N)


def _sigma(beta_key, digits: DigitSet) -> float:
    if isinstance(beta_key, BaseSequence):
        return log_card(beta_key.param if beta_key.is_geometric else beta_key.beta, digits)
    return log_card(beta_key, digits)


def _beta_fn(beta_key):
    if isinstance(beta_key, Fraction):
        return geometric(beta_key).beta_mp
    if isinstance(beta_key, BaseSequence):
        return beta_key.beta_mp
    return lambda: mpmath.mpf(beta_key)


def _key(beta):
    if isinstance(beta, BaseSequence):
        return beta
    if isinstance(beta, (int, Fraction, str)):
        return Fraction(beta)
    return float(beta)


def exp_p_coefficient(beta, digits: DigitSet, k: int, tol: float = 1e-12):
    """int_0^1 e^P(w) e^(2 pi i k w) dw as an mpmath number (it is tiny for large |k|)."""
    raw, _ = _coefficients(_key(beta), digits, max(abs(k), 1), tol)
    v = raw[abs(k)]
    return v if k >= 0 else mpmath.conj(v)


def psi_hat(beta, digits: DigitSet, k: int, tol: float = 1e-12) -> complex:
    """Fourier coefficient Psi_hat(k) = int_0^1 Psi(x) e^(-2 pi i k x) dx via the Gamma quotient.

    ``beta`` may be a number or a BaseSequence (its beta is used).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, psi = _coefficients(_key(beta), digits, max(abs(k), 1), tol)
    v = psi[abs(k)]
    return v if k >= 0 else v.conjugate()


def fourier_table(beta, digits: DigitSet, K: int, tol: float = 1e-12) -> FourierTable:
    if K < 0:
        raise ValueError("K must be non-negative")
    _, psi = _coefficients(_key(beta), digits, max(K, 1), tol)
    entries = {}
    for k in range(K + 1):
        v = psi[k] if k else complex(psi[0].real, 0.0)
        entries[k] = v
        entries[-k] = v.conjugate()
    return FourierTable(beta_float(beta), digits, entries, tol)


def resum_complex(x, table: FourierTable, K: int) -> complex:
    for k in range(-K, K + 1):
        if k not in table.entries:
            raise KeyError(f"table has no entry for k={k}")
    x = np.asarray(x, dtype=float)
    ks = np.arange(-K, K + 1)
    coef = np.array([table.entries[int(k)] for k in ks])
    return (np.exp(2j * np.pi * np.multiply.outer(x, ks)) * coef).sum(axis=-1)


def resum(x, table: FourierTable, K: int):
    """Real part of the partial Fourier sum; the imaginary part must stay below tol."""
    v = resum_complex(x, table, K)
    imag = float(np.max(np.abs(np.imag(v))))
    if imag > max(table.tol, 1e-12) * 10:
        raise ArithmeticError(f"imaginary residue {imag:.3g} in Fourier resummation")
    re = np.real(v)
    return float(re) if np.ndim(re) == 0 else re


def psi_hat_product_form(beta, digits: DigitSet, k: int, tol: float = 1e-12) -> complex:
    """The shifted-product expression (-1)^k sqrt|d| / Gamma(...) int prod_h (...)^(h+w) e^(2 pi i k w) dw.

    Double precision Gauss-Legendre; meant as an independent check for small |k|.
    """
    b = beta_float(beta)
    hs = np.arange(-80, 40, dtype=float)

    def integrand(w):
        w = np.asarray(w, dtype=float)
        x = np.add.outer(w, hs)
        lo = L(digits, b ** (x - 0.5))
        hi = L(digits, b ** (x + 0.5))
        logprod = (x * (lo - hi)).sum(axis=-1)
        return np.exp(logprod) * np.exp(2j * np.pi * k * w)

    q = gl_integrate(integrand, 0.0, 1.0, tol=tol, n0=16)
    sig = log_card(beta, digits)
    pref = (-1) ** k * math.sqrt(digits.cardinality)
    return pref * q.value * cmath.exp(-loggamma(complex(1 + sig, omega(b) * k)))
