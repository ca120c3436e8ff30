"""Moments of r(lambda) and the logarithmic average, against their Psi-based limits."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .core import (
    BaseSequence, DigitSet, NumerationError, as_fraction, beta_float, fibonacci, lucas,
    make_digit_set, mp_from_fraction, tau_floor,
)
from .counting import rep_values
from .density import DensityProfile, _beta_power, density_profile
from .fourier import psi_hat

MIN_PROFILE = 256
MAX_TABLE = 2_000_000


@dataclass(frozen=True)
class MomentReport:
    k: float
    x: float
    depths: tuple
    lhs_values: tuple
    rhs_value: float
    relative_gaps: tuple


def _sigma(base: BaseSequence, digits: DigitSet) -> float:
    return math.log(digits.cardinality) / math.log(base.beta)


def _log_beta(base: BaseSequence, v: Fraction) -> float:
    with mpmath.workdps(30):
        return float(mpmath.log(mp_from_fraction(v)) / mpmath.log(base.beta_mp()))


def _values_upto(base: BaseSequence, digits: DigitSet, x, n: int):
    top = as_fraction(base.term(n)) * _beta_power(base, x)
    if top > MAX_TABLE and base.is_integer and digits.is_integer:
        raise NumerationError(f"threshold {float(top):.3g} exceeds the table cap {MAX_TABLE}")
    lam, r = rep_values(base, digits, top)
    return top, np.array([float(v) for v in lam]), np.array([float(v) for v in r])


def moment_lhs(base: BaseSequence, digits: DigitSet, k: float, x: float, n: int) -> float:
    """|d|^(log_beta b_n - n) (beta^x b_n)^-k sum_{0 < lambda <= beta^x b_n} r(lambda) lambda^(k - sigma)."""
    if k <= 0:
        raise ValueError("moment_lhs is the k > 0 branch; use log_average for k <= 0")
    if n < 3:
        warnings.warn(f"n = {n} is pre-asymptotic")
    sig = _sigma(base, digits)
    top, lam, r = _values_upto(base, digits, x, n)
    total = float(np.sum(r * lam ** (k - sig)))
    lb = _log_beta(base, as_fraction(base.term(n)))
    norm = digits.cardinality ** (lb - n) * float(top) ** (-k)
    return norm * total


def _interp(profile: DensityProfile, pts: np.ndarray) -> np.ndarray:
    v = profile.values()
    N = v.size
    pos = np.mod(pts, 1.0) * N
    i = np.floor(pos).astype(int) % N
    f = pos - np.floor(pos)
    return (1 - f) * v[i] + f * v[(i + 1) % N]


def _linear_times_exp(v: np.ndarray, c: float) -> float:
    """int_0^1 of the piecewise-linear function with node values v (spacing 1/(len(v)-1)) times e^(c w)."""
    N = v.size - 1
    h = 1.0 / N
    if abs(c) * h < 1e-6:
        w = np.arange(N + 1) * h
        f = v * np.exp(c * w)
        return float(np.sum((f[1:] + f[:-1]) / 2) * h)
    E = np.exp(c * np.arange(N + 1) * h)
    dE = E[1:] - E[:-1]
    v0, v1 = v[:-1], v[1:]
    return float(np.sum(v0 * dE / c + (v1 - v0) / h * (h * E[1:] / c - dE / c ** 2)))


def moment_rhs(beta, digits: DigitSet, k: float, x: float, profile: DensityProfile) -> float:
    """Psi(x) - log(beta^k/|d|)/(beta^k - 1) int_0^1 Psi(x+w) beta^(k w) dw from a profile.

    Psi is linearly interpolated on the periodic profile; the product with
    beta^(k w) is then integrated exactly panel by panel.
    """
    N = len(profile.grid)
    if N < MIN_PROFILE:
        raise ValueError(f"profile needs at least {MIN_PROFILE} points, has {N}")
    b = beta_float(beta)
    w = np.arange(N + 1) / N
    integral = _linear_times_exp(_interp(profile, x + w), k * math.log(b))
    psi_x = float(_interp(profile, np.array([x]))[0])
    return psi_x - math.log(b ** k / digits.cardinality) / (b ** k - 1) * integral


def log_average(base: BaseSequence, digits: DigitSet, x: float, n: int, k: float = 0.0) -> tuple[float, float]:
    """(1/log|d|) sum r(lambda) lambda^(k - sigma) against sum_{h<n} |d|^(h - log_beta b_h) int Psi.

    Only k = 0 is meaningful: for k < 0 the left side converges while the
    right side grows with n.  The mean of Psi is Psi_hat(0).
    """
    if k > 0:
        raise ValueError("k must be <= 0")
    sig = _sigma(base, digits)
    _, lam, r = _values_upto(base, digits, x, n)
    lhs = float(np.sum(r * lam ** (k - sig))) / math.log(digits.cardinality)
    card = digits.cardinality
    a = sum(card ** (h - _log_beta(base, as_fraction(base.term(h)))) for h in range(n))
    mean = psi_hat(base if not base.is_geometric else base.param, digits, 0).real
    return lhs, a * mean


def moment_report(base: BaseSequence, digits: DigitSet, k: float, x: float, depths,
                  profile: DensityProfile) -> MomentReport:
    rhs = moment_rhs(base.beta, digits, k, x, profile)
    lhs = tuple(moment_lhs(base, digits, k, x, n) for n in depths)
    gaps = tuple(abs(v - rhs) / abs(rhs) for v in lhs)
    if len(gaps) >= 3 and not (gaps[-1] <= gaps[-2] <= gaps[-3]):
        warnings.warn("relative gaps are not non-increasing over the last three depths")
    return MomentReport(float(k), float(x), tuple(depths), lhs, rhs, gaps)


# ------------------------------------------------------ Chow-Slattery

@dataclass(frozen=True)
class ChowSlatteryReport:
    kind: str
    beta: float
    alpha: float
    sigma_c: float
    log_constant: float
    log_average_rows: tuple  # (n, lhs, rhs, lhs - rhs, first difference)
    moments: tuple  # MomentReport for k = 1, 2


def _kind_base(kind: str) -> BaseSequence:
    if kind == "fibonacci":
        return fibonacci()
    if kind == "lucas":
        return lucas()
    if kind.startswith("tau_floor") or kind.startswith("tau-floor"):
        tau = kind.split(":", 1)[1] if ":" in kind else "1.8"
        return tau_floor(tau)
    raise NumerationError(f"unsupported kind {kind!r}")


def chow_slattery_report(kind: str, n_max: int = 25, profile_points: int = 512,
                         profile_depth: int | None = None) -> ChowSlatteryReport:
    """Logarithmic-average and moment tables for digits {0,1} on a Fibonacci-like base.

    The limiting constant of (1/log x) sum_{lambda <= x} r/lambda^sigma is
    sigma alpha^-sigma int_0^1 Psi.
    """
    base = _kind_base(kind)
    digits = make_digit_set([0, 1])
    sig = _sigma(base, digits)
    alpha = base.alpha
    mean = psi_hat(base, digits, 0).real
    const = sig / alpha ** sig * mean
    rows = []
    prev_gap = None
    for n in range(1, n_max + 1):
        lhs, rhs = log_average(base, digits, 0.0, n)
        gap = lhs - rhs
        rows.append((n, lhs, rhs, gap, math.nan if prev_gap is None else gap - prev_gap))
        prev_gap = gap
    if profile_depth is None:
        profile_depth = n_max + 5
    profile = density_profile(base, digits, profile_depth, profile_points, with_bound=False)
    depths = tuple(range(max(2, n_max - 6), n_max + 1, 2))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        moms = tuple(moment_report(base, digits, k, 0.0, depths, profile) for k in (1, 2))
    return ChowSlatteryReport(kind, base.beta, float(alpha), sig, const, tuple(rows), moms)
