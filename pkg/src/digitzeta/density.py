"""The relative density Psi: scaling estimates, the defining series, and bound checks.

Every estimate starts from y0, a rational approximation (40+ digits) of
beta^x.  Larger arguments are exact multiples b_n * y0 or beta^h * y0, so
identities between counts hold exactly in rational arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .core import (
    BaseSequence, DigitSet, NumerationError, as_fraction, geometric, kappa,
    log_card, mp_from_fraction, mu,
)
from .counting import S

SAFETY = 0.9  # kappa' = 0.9 kappa
_DPS = 50


@dataclass(frozen=True)
class DensityEstimate:
    x: float
    value: float
    depth: int
    error_bound: float


@dataclass(frozen=True)
class DensityProfile:
    grid: tuple
    estimates: tuple
    base: BaseSequence
    digits: DigitSet

    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])

    @property
    def depth(self) -> int:
        return self.estimates[0].depth


def _beta_power(base: BaseSequence, x) -> Fraction:
    """beta^x as a Fraction; exact for integer x on rational geometric bases."""
    xq = as_fraction(x)
    if base.param is not None and xq.denominator == 1:
        return base.param ** int(xq)
    with mpmath.workdps(_DPS):
        return as_fraction(base.beta_mp() ** mp_from_fraction(xq))


def _scale(card: int, n, x) -> float:
    with mpmath.workdps(30):
        return float(mpmath.mpf(card) ** -(n + mp_from_fraction(as_fraction(x))))


def _estimate(base: BaseSequence, digits: DigitSet, x, n: int) -> float:
    y = as_fraction(base.term(n)) * _beta_power(base, x)
    return S(base, digits, y) * _scale(digits.cardinality, n, x)


def _kappa_prime(base: BaseSequence, digits: DigitSet) -> float:
    return SAFETY * kappa(base.beta, digits)


@lru_cache(maxsize=64)
def error_constant(base: BaseSequence, digits: DigitSet, samples: int = 16) -> float:
    """C in C*|d|^(-kappa' n), calibrated against a deep reference estimate.

    C = max over n in 1..n_ref-8 and ``samples`` x in [0, 1) of
    |est(n, x) - est(n_ref, x)| * |d|^(kappa' n).
    """
    n_ref = 22
    if base.max_index() is not None:
        n_ref = min(n_ref, base.max_index())
    if n_ref < 3:
        raise NumerationError("base table too short to calibrate the depth error")
    kp = _kappa_prime(base, digits)
    card = digits.cardinality
    C = 0.0
    for j in range(samples):
        x = Fraction(j, samples)
        ref = _estimate(base, digits, x, n_ref)
        for n in range(1, max(n_ref - 8, 2)):
            diff = abs(_estimate(base, digits, x, n) - ref)
            C = max(C, diff * card ** (kp * n))
    return C


def depth_error_bound(base: BaseSequence, digits: DigitSet, n: int) -> float:
    return error_constant(base, digits) * digits.cardinality ** (-_kappa_prime(base, digits) * n)


def psi_scaling(base: BaseSequence, digits: DigitSet, x, n: int, with_bound: bool = True) -> DensityEstimate:
    """|d|^(-n-x) S(b_n beta^x), the scaling-limit estimate of Psi(x) at depth n."""
    if n < 1:
        raise ValueError("depth n must be >= 1")
    v = _estimate(base, digits, x, n)
    eb = depth_error_bound(base, digits, n) if with_bound else math.nan
    return DensityEstimate(float(x), v, n, eb)


def _geometric(base) -> BaseSequence:
    if isinstance(base, BaseSequence):
        if not base.is_geometric:
            raise NumerationError("the defining series needs a geometric base")
        return base
    return geometric(base)


def psi_series_exact(base, digits: DigitSet, x, depth: int) -> Fraction:
    """|d|^x times the defining series cut at h < depth, as an exact rational."""
    g = _geometric(base)
    y0 = _beta_power(g, x)
    beta = g.param
    card = digits.cardinality
    total = Fraction(S(g, digits, y0))
    for h in range(depth):
        y = beta ** h * y0
        window = sum(S(g, digits, y) - S(g, digits, y - d / beta) for d in digits.values)
        total -= Fraction(window, card ** (h + 1))
    return total


def psi_series(base, digits: DigitSet, x, depth: int) -> DensityEstimate:
    """Partial sum (h < depth) of the defining series of Psi.

    By the self-similarity of S this equals psi_scaling at the same depth,
    which the tests check exactly.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    g = _geometric(base)
    exact = psi_series_exact(g, digits, x, depth)
    v = float(exact) * _scale(digits.cardinality, 0, x)
    eb = depth_error_bound(g, digits, depth) if depth >= 1 else math.inf
    return DensityEstimate(float(x), v, depth, eb)


def density_profile(base: BaseSequence, digits: DigitSet, n: int, N: int,
                    with_bound: bool = True) -> DensityProfile:
    """Estimates on the uniform grid k/N, k = 0..N-1."""
    if N < 1:
        raise ValueError("N must be positive")
    grid = tuple(Fraction(k, N) for k in range(N))
    est = tuple(psi_scaling(base, digits, x, n, with_bound=False) for x in grid)
    if with_bound:
        eb = depth_error_bound(base, digits, n)
        est = tuple(DensityEstimate(e.x, e.value, e.depth, eb) for e in est)
    return DensityProfile(tuple(float(x) for x in grid), est, base, digits)


# ----------------------------------------------------------- sandwich

@dataclass(frozen=True)
class SandwichReport:
    samples: int
    skipped: int
    depth: int
    worst_lower_margin: float
    worst_upper_margin: float
    worst_x_lower: float
    worst_x_upper: float
    holds: bool


def sandwich_constant(beta: int, digits: DigitSet) -> float:
    """mu/(|d| - mu) * sum over nonzero digits of (1 + floor(delta/beta))."""
    m = mu(beta, digits)
    b = int(beta)
    s = sum(1 + int(d) // b for d in digits.values if d != 0)
    return m / (digits.cardinality - m) * s


def sandwich_check(beta: int, digits: DigitSet, X, samples: int = 50, depth: int = 14,
                   seed: int = 0, xs=None) -> SandwichReport:
    """Check 0 <= S(x) - x^sigma Psi(log_beta x) <= x^log_beta(mu) * const at sample points.

    Psi is the depth-``depth`` estimate at frac(log_beta x).  With
    j = floor(log_beta x) the difference equals S(x) - S(x beta^(depth-j)) / |d|^(depth-j)
    exactly, so it is computed in rational arithmetic.  Points with x < 1 are skipped.
    """
    m = mu(beta, digits)
    b = int(beta)
    g = geometric(b)
    card = digits.cardinality
    const = sandwich_constant(b, digits)
    if xs is None:
        rng = np.random.default_rng(seed)
        xs = [Fraction(float(v)).limit_denominator(1000) for v in
              np.exp(rng.uniform(0.0, math.log(float(X)), samples))]
    lo_worst = up_worst = math.inf
    lo_x = up_x = math.nan
    skipped = 0
    for x in xs:
        xq = as_fraction(x)
        if xq < 1:
            skipped += 1
            continue
        j = 0
        while Fraction(b) ** (j + 1) <= xq:
            j += 1
        if depth < j:
            raise ValueError(f"depth {depth} is below log_beta x = {j}")
        shift = depth - j
        diff = S(g, digits, xq) - Fraction(S(g, digits, xq * b ** shift), card ** shift)
        rhs = float(xq) ** (math.log(m) / math.log(b)) * const
        lower = float(diff)
        upper = rhs - float(diff)
        if lower < lo_worst:
            lo_worst, lo_x = lower, float(xq)
        if upper < up_worst:
            up_worst, up_x = upper, float(xq)
    n = len(xs) - skipped
    return SandwichReport(n, skipped, depth, lo_worst, up_worst, lo_x, up_x,
                          bool(n == 0 or (lo_worst >= 0 and up_worst >= 0)))


# ----------------------------------------------------------- regularity

@dataclass(frozen=True)
class RegularityReport:
    eta: float
    lipschitz_quotient: float
    total_variation: float
    coarse_quotient: float
    coarse_variation: float
    refinement_ratio: float
    stable: bool


def _holder_quotient(v: np.ndarray, eta: float) -> float:
    N = v.size
    i = np.arange(N)
    dist = np.abs(i[:, None] - i[None, :])
    dist = np.minimum(dist, N - dist) / N
    dv = np.abs(v[:, None] - v[None, :])
    mask = dist > 0
    return float(np.max(dv[mask] / dist[mask] ** eta))


def _variation(v: np.ndarray) -> float:
    return float(np.abs(np.diff(np.append(v, v[0]))).sum())


def regularity_probe(profile: DensityProfile, eta: float | None = None) -> RegularityReport:
    """Empirical Hoelder quotient and total variation, with a half-grid comparison."""
    if eta is None:
        b = profile.base.beta
        eta = SAFETY * kappa(b, profile.digits) * log_card(
            profile.base.param if profile.base.param is not None else b, profile.digits)
    v = profile.values()
    q, tv = _holder_quotient(v, eta), _variation(v)
    vc = v[::2]
    qc, tvc = _holder_quotient(vc, eta), _variation(vc)
    ratio = q / qc if qc > 0 else (1.0 if q == 0 else math.inf)
    stable = bool(math.isfinite(q) and ratio < 2 and (tvc == 0 or tv / tvc < 2))
    return RegularityReport(eta, q, tv, qc, tvc, ratio, stable)


# ------------------------------------------------- perturbed bases

def perturbed_gap(base: BaseSequence, digits: DigitSet, n: int, depth: int = 18) -> float:
    """x^-sigma S(x) - alpha^-sigma Psi(log_beta(x/alpha)) at x = b_n.

    Needs a rational beta so that Psi can be estimated on the geometric
    base beta^k.  Tends to 0 as n grows for bases close to alpha beta^k.
    """
    if base.alpha is None:
        raise NumerationError("base has no scale alpha")
    if base.param is None:
        raise NumerationError("needs a rational beta")
    g = geometric(base.param)
    sig = log_card(base.param, digits)
    x = as_fraction(base.term(n))
    with mpmath.workdps(_DPS):
        alpha = base.alpha_mp()
        mp_x = mp_from_fraction(x) / alpha
        t = mpmath.log(mp_x) / mpmath.log(base.beta_mp())
        frac = t - mpmath.floor(t)
        lhs = S(base, digits, x) / mp_x ** sig / alpha ** sig
    psi = _estimate(g, digits, Fraction(float(frac)), depth)
    return float(lhs) - float(alpha ** -sig) * psi
