"""Exact representation counts r(lambda) and the counting function S(x)."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .core import (
    BaseSequence, BudgetExceeded, DigitSet, NumerationError, as_fraction, kappa,
    log_card, mu,
)

DEFAULT_NODE_BUDGET = 5_000_000
_BRUTE_CAP = 10 ** 8


@dataclass(frozen=True)
class CountResult:
    value: int
    nodes_explored: int


@dataclass(frozen=True)
class RepCountTable:
    base_id: str
    digit_id: str
    upper: int
    counts: np.ndarray

    def r(self, n: int) -> int:
        return int(self.counts[n])

    def cumulative(self) -> np.ndarray:
        """S(n) for n = 0..upper."""
        return np.cumsum(self.counts)

    def S(self, x) -> int:
        if x < 0:
            return 0
        n = math.floor(x)
        if n > self.upper:
            raise ValueError(f"table only reaches {self.upper}")
        return int(self.counts[: n + 1].sum())


def _require_integer_system(base: BaseSequence, digits: DigitSet) -> None:
    if not base.is_integer or not digits.is_integer:
        raise NumerationError("this operation needs integer base values and digits")


def rep_counts_integer(base: BaseSequence, digits: DigitSet, X: int) -> RepCountTable:
    """r(0..X) by repeated shifted convolution with the digit set."""
    _require_integer_system(base, digits)
    X = int(X)
    if X < 0:
        raise ValueError("X must be non-negative")
    dvals = [int(d) for d in digits.values]
    ks = base.indices_upto(Fraction(X) / digits.min_nonzero)
    # every count is at most |d|^levels, which decides the dtype
    big = digits.cardinality ** max(len(ks), 1) >= 2 ** 62
    counts = np.zeros(X + 1, dtype=object if big else np.int64)
    counts[0] = 1
    for k in ks:
        b = int(base.term(k))
        new = counts.copy()
        for d in dvals[1:]:
            sh = d * b
            if sh <= X:
                new[sh:] += counts[: X + 1 - sh]
        counts = new
    return RepCountTable(base.label(), digits.label(), X, counts)


class _Levels:
    """Indices and prefix maxima used by the pruned searches."""

    def __init__(self, base: BaseSequence, digits: DigitSet, top):
        self.ks = base.indices_upto(top / digits.min_nonzero) if top > 0 else []
        self.b = [as_fraction(base.term(k)) for k in self.ks]
        self.d = list(digits.values)
        run = Fraction(0)
        self.prefix_max = []  # largest sum reachable with levels ks[:i+1]
        for bk in self.b:
            run += digits.max_digit * bk
            self.prefix_max.append(run)


def _exact_target(lam) -> Fraction:
    if isinstance(lam, mpmath.mpf):
        raise NumerationError("exact counting needs a rational target")
    return as_fraction(lam)


def rep_count_exact(base: BaseSequence, digits: DigitSet, lam, budget: int = DEFAULT_NODE_BUDGET) -> CountResult:
    """r(lambda) by a descending search with memoised residuals."""
    target = _exact_target(lam)
    if target < 0:
        return CountResult(0, 0)
    if target == 0:
        return CountResult(1, 1)
    lv = _Levels(base, digits, target)
    frontier = {target: 1}
    nodes = 0
    for i in range(len(lv.ks) - 1, -1, -1):
        bk = lv.b[i]
        below = lv.prefix_max[i - 1] if i > 0 else Fraction(0)
        nxt: dict[Fraction, int] = {}
        for rem, mult in frontier.items():
            nodes += 1
            for d in lv.d:
                r2 = rem - d * bk
                if r2 < 0:
                    break
                if r2 <= below:
                    nxt[r2] = nxt.get(r2, 0) + mult
        frontier = nxt
        if nodes > budget:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
        if not frontier:
            break
    return CountResult(frontier.get(Fraction(0), 0), nodes)


def _count_upto(base: BaseSequence, digits: DigitSet, x: Fraction, strict: bool,
                budget: int) -> CountResult:
    if x < 0 or (strict and x == 0):
        return CountResult(0, 0)
    lv = _Levels(base, digits, x)
    card = digits.cardinality
    total = 0
    frontier = {x: 1}
    nodes = 0
    for i in range(len(lv.ks) - 1, -1, -1):
        bk = lv.b[i]
        below = lv.prefix_max[i - 1] if i > 0 else Fraction(0)
        full = card ** i  # sequences on the remaining lower levels
        nxt: dict[Fraction, int] = {}
        for rem, mult in frontier.items():
            nodes += 1
            for d in lv.d:
                r2 = rem - d * bk
                if r2 < 0 or (strict and r2 == 0):
                    break
                # every completion below fits: count them all at once
                if r2 > below or (not strict and r2 == below):
                    total += mult * full
                else:
                    nxt[r2] = nxt.get(r2, 0) + mult
        frontier = nxt
        if nodes > budget:
            raise BudgetExceeded(f"search exceeded {budget} nodes")
    # below the last level only the all-zero tail remains
    total += sum(frontier.values())
    return CountResult(total, nodes)


def counting_fn(base: BaseSequence, digits: DigitSet, x, strict: bool = False,
                budget: int = DEFAULT_NODE_BUDGET) -> CountResult:
    """S(x): number of digit sequences with value <= x (< x when ``strict``).

    Rational inputs are compared exactly.  An mpmath value is bracketed by
    the rationals one ulp either side; if the two counts differ a warning is
    issued and the lower count is returned.
    """
    if isinstance(x, mpmath.mpf):
        eps = abs(x) * mpmath.mpf(2) ** (-mpmath.mp.prec + 2) + mpmath.mpf(2) ** (-mpmath.mp.prec)
        lo = as_fraction(x - eps)
        hi = as_fraction(x + eps)
        a = _count_upto(base, digits, lo, strict, budget)
        b = _count_upto(base, digits, hi, strict, budget)
        if a.value != b.value:
            warnings.warn(f"S(x) is not resolved at this precision: {a.value} vs {b.value}")
        return CountResult(a.value, a.nodes_explored + b.nodes_explored)
    return _count_upto(base, digits, as_fraction(x), strict, budget)


def S(base: BaseSequence, digits: DigitSet, x, strict: bool = False) -> int:
    return counting_fn(base, digits, x, strict).value


def rep_values(base: BaseSequence, digits: DigitSet, upper) -> tuple[list, list]:
    """All representable lambda in (0, upper] with their counts r(lambda), sorted."""
    upper = as_fraction(upper)
    if upper <= 0:
        return [], []
    if base.is_integer and digits.is_integer:
        tab = rep_counts_integer(base, digits, math.floor(upper))
        nz = np.nonzero(tab.counts)[0]
        nz = nz[nz > 0]
        return [Fraction(int(v)) for v in nz], [int(tab.counts[v]) for v in nz]
    vals: dict[Fraction, int] = {Fraction(0): 1}
    for k in base.indices_upto(upper / digits.min_nonzero):
        bk = as_fraction(base.term(k))
        nxt: dict[Fraction, int] = {}
        for v, m in vals.items():
            for d in digits.values:
                w = v + d * bk
                if w > upper:
                    break
                nxt[w] = nxt.get(w, 0) + m
        vals = nxt
    keys = sorted(v for v in vals if v > 0)
    return keys, [vals[v] for v in keys]


def rep_count_bruteforce(base: BaseSequence, digits: DigitSet, lam, depth: int) -> CountResult:
    """Exhaustive enumeration over d^depth (test oracle)."""
    hist, leaves = bruteforce_histogram(base, digits, depth, as_fraction(lam))
    return CountResult(hist.get(as_fraction(lam), 0), leaves)


def bruteforce_histogram(base: BaseSequence, digits: DigitSet, depth: int, upper) -> tuple[dict, int]:
    """Values of all tuples in d^depth with value <= upper, tallied one tuple at a time.

    Partial sums above ``upper`` are dropped as soon as they appear (digits
    are non-negative, so they can only grow).
    """
    upper = as_fraction(upper)
    if digits.is_integer and base.is_integer and upper.denominator == 1:
        sums = np.zeros(1, dtype=np.int64)
        dv = np.array([int(d) for d in digits.values], dtype=np.int64)
        for k in range(depth):
            sums = (sums[:, None] + dv[None, :] * int(base.term(k))).ravel()
            sums = sums[sums <= int(upper)]
            if sums.size > _BRUTE_CAP:
                raise BudgetExceeded(f"more than {_BRUTE_CAP} partial sums at level {k}")
        vals, cnt = np.unique(sums, return_counts=True)
        return {Fraction(int(v)): int(c) for v, c in zip(vals, cnt)}, int(sums.size)
    sums_f = [Fraction(0)]
    for k in range(depth):
        bk = as_fraction(base.term(k))
        sums_f = [s + d * bk for s in sums_f for d in digits.values if s + d * bk <= upper]
        if len(sums_f) > _BRUTE_CAP:
            raise BudgetExceeded(f"more than {_BRUTE_CAP} partial sums at level {k}")
    out: dict[Fraction, int] = {}
    for s in sums_f:
        out[s] = out.get(s, 0) + 1
    return out, len(sums_f)


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class UpperBoundReport:
    X: int
    mu: int
    exponent: float
    max_ratio: float
    argmax: int
    violated: bool


def verify_upper_bound(base: BaseSequence, digits: DigitSet, X: int) -> UpperBoundReport:
    """max over 1 <= n <= X of r(n) / (mu n^log_beta(mu))."""
    if not base.is_geometric:
        raise NumerationError("the pointwise bound is stated for geometric bases")
    m = mu(base.param, digits)
    e = math.log(m) / math.log(base.beta)
    tab = rep_counts_integer(base, digits, X)
    n = np.arange(1, X + 1, dtype=float)
    ratio = tab.counts[1:].astype(float) / (m * n ** e)
    i = int(np.argmax(ratio))
    return UpperBoundReport(X, m, e, float(ratio[i]), i + 1, bool(ratio[i] > 1))


@dataclass(frozen=True)
class WindowReport:
    x: Fraction
    delta: Fraction
    lhs: int
    rhs: float
    ratio: float
    exponent: float


def window_bound_probe(base: BaseSequence, digits: DigitSet, x, delta, eps: float = 0.05) -> WindowReport:
    """Count over the closed window [x - delta, x] against (1+delta) x^((1-kappa) sigma + eps)."""
    xq, dq = as_fraction(x), as_fraction(delta)
    if dq < 0:
        raise ValueError("delta must be non-negative")
    lhs = S(base, digits, xq) - S(base, digits, xq - dq, strict=True)
    sig = log_card(base.beta, digits)
    e = (1 - kappa(base.beta, digits)) * sig + eps
    rhs = (1 + float(dq)) * float(xq) ** e
    return WindowReport(xq, dq, lhs, rhs, lhs / rhs, e)
