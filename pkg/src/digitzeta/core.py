"""Digit sets, base sequences and the structural constants kappa and mu.

Counting uses exact integers and Fractions.  Analytic quantities use floats,
with mpmath reserved for the few places where doubles run out of digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Iterable, Sequence

import mpmath


class NumerationError(ValueError):
    """Invalid numeration system data (digits, base or table file)."""


class BudgetExceeded(RuntimeError):
    """A requested enumeration is larger than the configured budget."""


def as_fraction(x) -> Fraction:
    """Exact rational from int, Fraction, str or float (floats via repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a number here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, mpmath.mpf):
        return _mpf_to_fraction(x)
    return Fraction(x)


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def beta_float(beta) -> float:
    """beta as a float from a number, numeric string or BaseSequence."""
    if isinstance(beta, BaseSequence):
        return beta.beta
    if isinstance(beta, str):
        return float(as_fraction(beta))
    return float(beta)


def mp_from_fraction(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


# ---------------------------------------------------------------- digit sets

@dataclass(frozen=True)
class DigitSet:
    values: tuple[Fraction, ...]
    max_digit: Fraction
    min_nonzero: Fraction
    cardinality: int
    gcd_if_integer: int | None

    @property
    def is_integer(self) -> bool:
        return self.gcd_if_integer is not None

    @property
    def nonzero(self) -> tuple[Fraction, ...]:
        return self.values[1:]

    def floats(self) -> list[float]:
        return [float(v) for v in self.values]

    def label(self) -> str:
        return "{" + ",".join(str(v) for v in self.values) + "}"


def make_digit_set(values: Iterable) -> DigitSet:
    vals = [as_fraction(v) for v in values]
    if not vals:
        raise NumerationError("digit set is empty")
    if any(v < 0 for v in vals):
        raise NumerationError("digits must be non-negative")
    uniq = sorted(set(vals))
    if uniq[0] != 0:
        raise NumerationError("digit set must contain 0")
    if len(uniq) < 2:
        raise NumerationError("digit set needs at least two distinct values")
    g = None
    if all(v.denominator == 1 for v in uniq):
        g = reduce(math.gcd, (int(v) for v in uniq[1:]))
    return DigitSet(tuple(uniq), uniq[-1], uniq[1], len(uniq), g)


def parse_digits(text: str) -> DigitSet:
    return make_digit_set(t for t in text.split(",") if t.strip())


# ------------------------------------------------------------ base sequences

_PHI = (1 + 5 ** 0.5) / 2

KINDS = ("geometric", "fibonacci", "lucas", "tau_floor", "central_binomial", "table")


@dataclass(frozen=True)
class BaseSequence:
    """Evaluator for b_k.

    ``beta`` is the ratio limit, ``alpha`` the scale in b_k ~ alpha*beta^k
    (None when unknown) and ``gamma`` the perturbation exponent.
    """

    kind: str
    beta: float
    alpha: float | None = None
    gamma: float | None = None
    param: Fraction | None = None
    table: tuple[Fraction, ...] | None = None
    _cache: list = field(default_factory=list, repr=False, compare=False)

    # exact terms

    def term(self, k: int):
        """b_k as an int (or Fraction for rational geometric/table data)."""
        if k < 0:
            raise IndexError(k)
        if self.kind == "geometric":
            q = self.param
            v = q ** k
            return int(v) if v.denominator == 1 else v
        if self.kind == "table":
            if k >= len(self.table):
                raise IndexError(f"table holds {len(self.table)} terms, asked for index {k}")
            v = self.table[k]
            return int(v) if v.denominator == 1 else v
        cache = self._cache
        while len(cache) <= k:
            cache.append(self._next_term(len(cache)))
        return cache[k]

    def _next_term(self, k: int) -> int:
        c = self._cache
        if self.kind == "fibonacci":
            return (1, 2)[k] if k < 2 else c[k - 1] + c[k - 2]
        if self.kind == "lucas":
            return (1, 3)[k] if k < 2 else c[k - 1] + c[k - 2]
        if self.kind == "central_binomial":
            return 1 if k == 0 else c[k - 1] * 2 * (2 * k - 1) // k
        if self.kind == "tau_floor":
            return _floor_power(self.param, k + 1)
        raise AssertionError(self.kind)

    def terms(self, n: int) -> list:
        return [self.term(k) for k in range(n)]

    @property
    def is_integer(self) -> bool:
        if self.kind == "geometric":
            return self.param.denominator == 1
        if self.kind == "table":
            return all(v.denominator == 1 for v in self.table)
        return True

    @property
    def is_geometric(self) -> bool:
        return self.kind == "geometric"

    def max_index(self) -> int | None:
        return len(self.table) - 1 if self.kind == "table" else None

    def indices_upto(self, limit) -> list[int]:
        """All k with b_k <= limit (assumes b eventually exceeds limit for good)."""
        out = []
        k = 0
        above = 0
        last = self.max_index()
        while above < 8:
            if last is not None and k > last:
                break
            if self.term(k) <= limit:
                out.append(k)
                above = 0
            else:
                above += 1
            k += 1
        return out

    # analytic helpers

    def beta_mp(self):
        """beta at the current mpmath precision."""
        if self.kind == "geometric":
            return mp_from_fraction(self.param)
        if self.kind in ("fibonacci", "lucas"):
            return (1 + mpmath.sqrt(5)) / 2
        if self.kind == "tau_floor":
            return mp_from_fraction(self.param)
        if self.kind == "central_binomial":
            return mpmath.mpf(4)
        return mp_from_fraction(self.param)

    def alpha_mp(self):
        if self.alpha is None:
            raise NumerationError(f"{self.kind} base has no declared scale alpha")
        if self.kind == "geometric":
            return mpmath.mpf(1)
        if self.kind == "fibonacci":
            phi = (1 + mpmath.sqrt(5)) / 2
            return phi ** 2 / mpmath.sqrt(5)
        if self.kind == "lucas":
            return (1 + mpmath.sqrt(5)) / 2
        if self.kind == "tau_floor":
            return mp_from_fraction(self.param)
        return mpmath.mpf(self.alpha)

    def deviation(self, k: int) -> float:
        """b_k/alpha - beta^k, evaluated without cancellation."""
        if self.kind == "geometric":
            return 0.0
        b = self.term(k)
        digits = len(str(int(b))) + 30
        with mpmath.workdps(digits):
            return float(mp_from_fraction(as_fraction(b)) / self.alpha_mp() - self.beta_mp() ** k)

    def ratio_probe(self, kmax: int = 60) -> list[float]:
        """|b_{k+1}/b_k - beta| for k < kmax."""
        n = kmax + 1
        if self.max_index() is not None:
            n = min(n, self.max_index() + 1)
        b = [as_fraction(v) for v in self.terms(n)]
        with mpmath.workdps(40):
            beta = self.beta_mp()
            return [float(abs(mp_from_fraction(b[k + 1] / b[k]) - beta)) for k in range(n - 1)]

    def label(self) -> str:
        if self.kind == "geometric":
            return f"geometric({self.param})"
        if self.kind == "tau_floor":
            return f"tau_floor({self.param})"
        return self.kind


def _floor_power(tau: Fraction, m: int) -> int:
    """floor(tau**m) exactly for rational tau."""
    v = tau ** m
    return v.numerator // v.denominator


def geometric(beta) -> BaseSequence:
    q = as_fraction(beta)
    if q <= 1:
        raise NumerationError("beta must exceed 1")
    return BaseSequence("geometric", float(q), 1.0, 1.0, q)


def fibonacci() -> BaseSequence:
    return BaseSequence("fibonacci", _PHI, _PHI ** 2 / 5 ** 0.5, 1.0)


def lucas() -> BaseSequence:
    # b_k = L_{k+1}; the scale is read off b_n / phi^n at n = 40
    seq = BaseSequence("lucas", _PHI, None, 1.0)
    with mpmath.workdps(40):
        phi = (1 + mpmath.sqrt(5)) / 2
        alpha = float(seq.term(40) / phi ** 40)
    return BaseSequence("lucas", _PHI, alpha, 1.0)


def tau_floor(tau) -> BaseSequence:
    q = as_fraction(tau)
    if not 1 < q:
        raise NumerationError("tau must exceed 1")
    # b_k = floor(tau^(k+1)) = tau^(k+1) - O(1), so the scale is tau itself
    return BaseSequence("tau_floor", float(q), float(q), 1.0, q)


def central_binomial() -> BaseSequence:
    return BaseSequence("central_binomial", 4.0, None, None)


def table_base(values: Sequence, beta, alpha=None, gamma=None) -> BaseSequence:
    vals = tuple(as_fraction(v) for v in values)
    if not vals:
        raise NumerationError("base table is empty")
    if any(v <= 0 for v in vals):
        raise NumerationError("base values must be positive")
    b = as_fraction(beta)
    if b <= 1:
        raise NumerationError("beta must exceed 1")
    if gamma is not None and not 0 < float(gamma) <= 1:
        raise NumerationError("gamma must lie in (0, 1]")
    return BaseSequence(
        "table", float(b),
        None if alpha is None else float(alpha),
        None if gamma is None else float(gamma),
        b, vals,
    )


def load_base_table(path: str | Path) -> BaseSequence:
    """Read a base file: ``beta=`` header (plus optional gamma/alpha), then one value per line."""
    header: dict[str, str] = {}
    values = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            if values:
                raise NumerationError(f"header line after values: {line!r}")
            key, val = (t.strip() for t in line.split("=", 1))
            if key not in ("beta", "gamma", "alpha"):
                raise NumerationError(f"unknown header key {key!r}")
            header[key] = val
        else:
            values.append(line)
    if "beta" not in header:
        raise NumerationError("table file needs a beta=<value> header")
    try:
        return table_base(values, header["beta"], header.get("alpha"), header.get("gamma"))
    except (ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, NumerationError):
            raise
        raise NumerationError(f"bad table file {path}: {exc}") from exc


def parse_base(text: str, beta=None) -> BaseSequence:
    """CLI-style base description: geometric, fibonacci, lucas, tau-floor:<t>, central-binomial, table:<path>."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().replace("-", "_")
    if kind == "geometric":
        if beta is None:
            raise NumerationError("geometric base needs --beta")
        return geometric(beta)
    if kind == "fibonacci":
        return fibonacci()
    if kind == "lucas":
        return lucas()
    if kind == "tau_floor":
        if not arg:
            raise NumerationError("tau-floor needs a value, e.g. tau-floor:1.8")
        return tau_floor(arg)
    if kind == "central_binomial":
        return central_binomial()
    if kind == "table":
        return load_base_table(arg)
    raise NumerationError(f"unknown base kind {text!r}")


# ---------------------------------------------------------- kappa and mu

@dataclass(frozen=True)
class SystemParams:
    kappa: float
    mu: int | None
    log_card: float


def log_card(beta, digits: DigitSet) -> float:
    """log_beta |d|, exact when |d| is an integer power of an integer beta."""
    n = digits.cardinality
    q = as_fraction(beta) if not isinstance(beta, float) else None
    if q is not None and q.denominator == 1:
        b = int(q)
        p, e = 1, 0
        while p < n:
            p *= b
            e += 1
        if p == n:
            return float(e)
    return math.log(n) / math.log(float(q if q is not None else beta))


def _kappa_sum(beta: float, u: Fraction, dmax: float, tail_tol: float) -> float:
    """Sum_{k>=1} beta^-floor(k/u) * dmax, grouped by blocks of equal floor(k/u)."""
    total = 0.0
    j = 0
    while True:
        lo = max(math.ceil(j * u), 1)
        hi = math.ceil((j + 1) * u)  # k in [lo, hi) have floor(k/u) == j
        cnt = max(hi - lo, 0)
        total += cnt * beta ** (-j) * dmax
        # every later block holds at most ceil(u)+1 indices
        tail = (math.ceil(u) + 1) * dmax * beta ** (-(j + 1)) / (1 - 1 / beta)
        if tail < tail_tol:
            return total
        j += 1


def kappa(beta, digits: DigitSet, tol: float = 1e-9) -> float:
    """Largest u in (0, 1] with sum_k beta^-floor(k/u) max(d) <= 1, by bisection."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = beta_float(beta)
    dmax = float(digits.max_digit)

    def feasible(u: float) -> bool:
        return _kappa_sum(b, Fraction(u), dmax, tol / 10) <= 1.0

    if feasible(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def mu(beta, digits: DigitSet) -> int:
    """Largest number of digits sharing a residue class mod beta."""
    q = as_fraction(beta)
    if q.denominator != 1 or q < 2:
        raise NumerationError("mu needs an integer beta >= 2")
    if not digits.is_integer:
        raise NumerationError("mu needs integer digits")
    if digits.gcd_if_integer != 1:
        raise NumerationError("mu needs gcd(digits) = 1")
    b = int(q)
    counts: dict[int, int] = {}
    for d in digits.values:
        counts[int(d) % b] = counts.get(int(d) % b, 0) + 1
    return max(counts.values())


def system_params(beta, digits: DigitSet, tol: float = 1e-9) -> SystemParams:
    m = None
    try:
        m = mu(beta, digits)
    except NumerationError:
        pass
    return SystemParams(kappa(beta, digits, tol), m, log_card(beta, digits))
