"""Tri-state convergence analysis for positive series with computable term ratios.

A series is given by its first term (in log form) and the log ratio
``log(a[n+1] / a[n])``. The window ``start..end`` is summed exactly and
the tail is classified from the ratio, sampled on a geometric grid
beyond the window:

* ratio settling below 1: geometric majorant (ratio test);
* ratio settling at 1: the local power exponent
  ``e(n) = -log(a[n+1]/a[n]) / log(1 + 1/n)`` decides (Gauss's test).
  ``e > 1`` gives an integral-test bracket for the tail, ``e <= 1`` a
  ``C / n`` lower comparator;
* ratio at or above 1: terms do not vanish.

The grid check presumes the ratio behaves regularly between samples,
which holds when it is a rational function of ``n`` (birth-death chains
with polynomial rates). When the exponent has not settled by the end of
the grid the verdict is inconclusive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Callable, Optional

import numpy as np

EXPONENT_TOL = 1e-6
EPS = float(np.finfo(float).eps)
GRID_DECADES = 6


class SeriesVerdict(str, Enum):
    FINITE = "finite"
    DIVERGENT = "divergent"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SeriesResult:
    verdict: SeriesVerdict
    start: int
    end: int
    partial_sum: float
    lower: float
    upper: float
    last_term: float
    test: str
    limit_ratio: Optional[float] = None
    tail_exponent: Optional[float] = None
    comparator: Optional[float] = None

    @property
    def value(self) -> float:
        """Midpoint of the bracket for a finite sum, else the partial sum."""
        if self.verdict is SeriesVerdict.FINITE:
            return 0.5 * (self.lower + self.upper)
        return self.partial_sum

    @property
    def bracket(self) -> tuple[float, float]:
        return (self.lower, self.upper)


def log_ratio(num, den) -> float:
    """log(num / den), exact-rounded when both are ints or Fractions."""
    if num == 0:
        return -math.inf
    if den == 0:
        return math.inf
    if not (type(num) is int and type(den) is int):  # plain ints skip the slow abstract-class checks
        if not (isinstance(num, Rational) and isinstance(den, Rational)):
            return math.log(float(num)) - math.log(float(den))
        q = Fraction(num) / Fraction(den)
        num, den = q.numerator, q.denominator
    # int / int is correctly rounded, so log1p keeps full precision near 1
    if den < 2 * num and num < 2 * den:
        return math.log1p((num - den) / den)
    try:
        q = num / den
    except OverflowError:
        q = math.inf
    if 0.0 < q < math.inf:
        return math.log(q)
    return math.log(num) - math.log(den)


def log_terms(log_first: float, ratio: Callable[[int], float], start: int, end: int) -> np.ndarray:
    """log a[n] for n = start..end."""
    steps = np.fromiter((ratio(n) for n in range(start, end)), dtype=float, count=end - start)
    hit = np.flatnonzero(steps == -np.inf)
    if hit.size:
        steps[hit[0]:] = -np.inf
    out = np.empty(end - start + 1)
    out[0] = log_first
    np.cumsum(steps, out=out[1:])
    out[1:] += log_first
    return out


def _grid(end: int) -> list[int]:
    pts = sorted({int(round(end * 10 ** (j / 2))) for j in range(2 * GRID_DECADES + 1)})
    return pts


def analyze_series(
    log_first: float,
    ratio: Callable[[int], float],
    start: int,
    terms: int = 100_000,
    logs: Optional[np.ndarray] = None,
) -> SeriesResult:
    """Sum ``terms`` terms from ``start`` and classify the tail.

    ``ratio(n)`` returns ``log(a[n+1] / a[n])``. Pass precomputed
    ``logs`` (from :func:`log_terms`) to avoid recomputing them.
    """
    end = start + terms - 1
    if logs is None:
        logs = log_terms(log_first, ratio, start, end)
    with np.errstate(over="ignore", under="ignore"):
        vals = np.exp(logs)
    partial = math.fsum(vals) if np.all(np.isfinite(vals)) else math.inf
    log_last = float(logs[-1])
    # rounding allowance: the running log sum can drift by about one ulp per term
    slack = 4 * EPS * len(logs)
    last = float(vals[-1])
    if log_last == -math.inf:
        # a zero ratio inside the window: every later term vanishes
        return SeriesResult(
            SeriesVerdict.FINITE, start, end, partial, partial * (1 - slack), partial * (1 + slack), 0.0, "terminating"
        )

    grid = _grid(end)
    lr = np.array([ratio(n) for n in grid])
    expo = -lr / np.array([math.log1p(1.0 / n) for n in grid])
    rho = math.exp(min(float(lr[-1]), 700.0))

    def result(verdict, lower, upper, test, **kw):
        if verdict is SeriesVerdict.FINITE:
            lower, upper = lower * (1 - slack), upper * (1 + slack)
        return SeriesResult(verdict, start, end, partial, lower, upper, last, test, limit_ratio=rho, **kw)

    if np.all(lr >= 0):
        return result(SeriesVerdict.DIVERGENT, partial, math.inf, "non-vanishing terms", comparator=last)
    if lr[-1] > 0:
        return result(SeriesVerdict.DIVERGENT, partial, math.inf, "ratio above 1")
    e_far, e_prev = float(expo[-1]), float(expo[-2])
    if e_far > 2 * e_prev > 0:
        # exponent grows with n: the ratio stays bounded away from 1
        r_hi = math.exp(float(np.max(lr)))
        r_lo = math.exp(float(np.min(lr)))
        if r_hi >= 1:
            return result(SeriesVerdict.INCONCLUSIVE, partial, math.inf, "ratio not yet below 1 at window end")
        upper = partial + _scaled(log_last, math.log(r_hi) - math.log1p(-r_hi))
        lower = partial + (_scaled(log_last, math.log(r_lo) - math.log1p(-r_lo)) if r_lo > 0 else 0.0)
        return result(SeriesVerdict.FINITE, lower, upper, "ratio test")

    # ratio -> 1: compare the local exponent with 1
    if abs(e_far - e_prev) > EXPONENT_TOL * max(1.0, abs(e_far)):
        return result(SeriesVerdict.INCONCLUSIVE, partial, math.inf, "tail exponent not settled", tail_exponent=e_far)
    p_lo, p_hi = float(np.min(expo)), float(np.max(expo))
    if e_far <= 1 + EXPONENT_TOL:
        # a[n] >= a[N] (N/n)^p_hi with p_hi ~ 1
        return result(
            SeriesVerdict.DIVERGENT,
            partial,
            math.inf,
            "Gauss test (exponent <= 1)",
            tail_exponent=e_far,
            comparator=last * end,
        )
    if p_lo <= 1 + EXPONENT_TOL:
        return result(SeriesVerdict.INCONCLUSIVE, partial, math.inf, "window too short for a tail bound", tail_exponent=e_far)
    # integral test: a[N](N/n)^p_hi <= a[n] <= a[N](N/n)^p_lo for n > N
    upper = partial + _scaled(log_last, math.log(end) - math.log(p_lo - 1))
    lower = partial + _scaled(
        log_last, p_hi * math.log(end) + (1 - p_hi) * math.log(end + 1) - math.log(p_hi - 1)
    )
    return result(SeriesVerdict.FINITE, lower, upper, "integral test", tail_exponent=e_far)


def _scaled(log_a: float, log_factor: float) -> float:
    return math.exp(min(log_a + log_factor, 709.0))
