"""Candidate stationary measures and the checks run against them.

A measure here is a constant solution of the forward equation: at every
state the probability flux in equals the flux out. Infinite state spaces
are only ever checked on finite windows, and only at states whose whole
in-neighbourhood lies inside the window.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from .kinetics import FiniteSupportFunction, apply_generator
from .model import CtmcSpec, State, as_state, falling_factorial
from .series import SeriesResult, SeriesVerdict, analyze_series, log_ratio, log_terms

DEFAULT_TERMS = 100_000
# fluxes below this have lost relative precision to underflow and are not checked
UNDERFLOW_SCALE = 1e-280


@dataclass
class StationaryMeasure:
    """Probability mass oracle plus what is known about it.

    ``kind`` is one of ``"product-poisson"``, ``"birth-death"`` or
    ``"table"``. ``normalization`` holds the bracket on the normalizing
    sum when it had to be computed numerically.
    """

    mass: Callable[[State], float]
    kind: str
    description: str
    params: dict = field(default_factory=dict)
    normalizable: SeriesVerdict = SeriesVerdict.FINITE
    normalization: Optional[SeriesResult] = None

    def __call__(self, x) -> float:
        return self.mass(as_state(x))

    @property
    def relative_uncertainty(self) -> float:
        """Relative width of the normalization bracket (0 for closed forms)."""
        if self.normalization is None:
            return 0.0
        lo, hi = self.normalization.bracket
        return (hi - lo) / lo


def product_form_poisson(c) -> StationaryMeasure:
    """prod_i c_i^x_i e^{-c_i} / x_i!"""
    c = tuple(float(v) for v in np.atleast_1d(c))
    if any(not v > 0 for v in c):
        raise ValueError("Poisson parameters must be positive")
    logc = [math.log(v) for v in c]

    def mass(x: State) -> float:
        if len(x) != len(c):
            raise ValueError("state dimension does not match c")
        if any(v < 0 for v in x):
            return 0.0
        return math.exp(math.fsum(xi * lc - ci - math.lgamma(xi + 1) for xi, lc, ci in zip(x, logc, c)))

    return StationaryMeasure(mass, "product-poisson", f"Poisson{c}", params={"c": c})


def table_measure(table: dict, description: str = "explicit table") -> StationaryMeasure:
    table = {as_state(k): float(v) for k, v in table.items()}
    if any(v < 0 for v in table.values()):
        raise ValueError("masses must be non-negative")
    return StationaryMeasure(lambda x: table.get(x, 0.0), "table", description, params={"table": table})


def birth_death_stationary(birth, death, lowest: int, terms: int = DEFAULT_TERMS) -> StationaryMeasure:
    """Detailed-balance measure of a birth-death chain on {lowest, ...}.

    pi(x+1) / pi(x) = birth(x) / death(x+1). The normalizing sum is
    classified by :func:`analyze_series`; if it diverges the returned
    measure is unnormalized and flagged.
    """

    def ratio(n: int) -> float:
        b, d = birth(n), death(n + 1)
        if b < 0 or d <= 0:
            if b == 0:
                return -math.inf
            raise ValueError(f"death rate must be positive above the base state (x={n + 1})")
        return log_ratio(b, d)

    end = lowest + terms - 1
    logs = log_terms(0.0, ratio, lowest, end)
    series = analyze_series(0.0, ratio, lowest, terms, logs=logs)
    finite = series.verdict is SeriesVerdict.FINITE
    log_z = math.log(series.value) if finite else 0.0
    cache = {"logs": logs}

    def log_weights(end: int) -> np.ndarray:
        """Unnormalized log pi on lowest..end."""
        arr = cache["logs"]
        while end - lowest >= len(arr):
            n0 = lowest + len(arr) - 1
            ext = log_terms(float(arr[-1]), ratio, n0, n0 + len(arr))
            arr = np.concatenate([arr, ext[1:]])
            cache["logs"] = arr
        return arr[: end - lowest + 1]

    def log_weight(x: int) -> float:
        return float(log_weights(x)[-1])

    def mass(s: State) -> float:
        (x,) = s
        if x < lowest:
            return 0.0
        return math.exp(log_weight(x) - log_z)

    return StationaryMeasure(
        mass,
        "birth-death",
        "detailed-balance birth-death measure" + ("" if finite else " (not normalizable)"),
        params={"lowest": lowest, "birth": birth, "death": death, "log_weight": log_weight,
                "log_weights": log_weights},
        normalizable=series.verdict,
        normalization=series if finite else None,
    )


# -- windows -----------------------------------------------------------------


def box_window(upper, lower=None) -> list[State]:
    """All integer points with lower_i <= x_i <= upper_i."""
    upper = [int(u) for u in np.atleast_1d(upper)]
    lower = [0] * len(upper) if lower is None else [int(v) for v in np.atleast_1d(lower)]
    return list(itertools.product(*(range(lo, hi + 1) for lo, hi in zip(lower, upper))))


def interval_window(lo: int, hi: int) -> list[State]:
    return [(n,) for n in range(lo, hi + 1)]


# -- balance -----------------------------------------------------------------


@dataclass
class BalanceResidual:
    residuals: dict
    scales: dict
    interior: list
    boundary: list
    underflow: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def max_scaled(self) -> float:
        pairs = zip(self.residuals.values(), self.scales.values())
        return max(((r / s if s > 0 else (0.0 if r == 0 else math.inf)) for r, s in pairs), default=0.0)

    def passes(self, tol: float) -> bool:
        return all(r <= tol * s for r, s in zip(self.residuals.values(), self.scales.values()))


def split_window(spec: CtmcSpec, window: Iterable) -> tuple[list[State], list[State], dict]:
    """Interior states (all predecessors inside) and boundary states."""
    states = [as_state(x) for x in window]
    inside = set(states)
    interior, boundary, preds = [], [], {}
    for x in states:
        p = spec.predecessors(x)
        if all(y in inside for y in p):
            interior.append(x)
            preds[x] = p
        else:
            boundary.append(x)
    return interior, boundary, preds


def balance_residual(spec: CtmcSpec, pi, window: Iterable) -> BalanceResidual:
    """|sum_y pi(y) q(y, x) - pi(x) q(x)| at each interior state of ``window``.

    The scale at ``x`` is inflow plus outflow, so ``passes(tol)`` is a
    relative test.
    """
    interior, boundary, preds = split_window(spec, window)
    if not interior:
        raise ValueError("window has no interior state")
    residuals, scales, skipped = {}, {}, []
    for x in interior:
        inflow = math.fsum(pi(y) * spec.rate(y, x) for y in preds[x])
        outflow = pi(x) * spec.total_rate(x)
        if inflow + outflow < UNDERFLOW_SCALE and (inflow > 0 or outflow > 0):
            skipped.append(x)
            continue
        residuals[x] = abs(inflow - outflow)
        scales[x] = inflow + outflow
    return BalanceResidual(residuals, scales, interior, boundary, skipped)


def embedded_transition(spec: CtmcSpec, x, y) -> float:
    """q(x, y) / q(x) for the jump chain."""
    x, y = as_state(x), as_state(y)
    total = spec.total_rate(x)
    if total == 0:
        raise ValueError(f"state {x} is absorbing; the jump chain is undefined there")
    return spec.rate(x, y) / total


def embedded_stationarity_residual(spec: CtmcSpec, pi, window: Iterable) -> BalanceResidual:
    """|pi_Z(x) - sum_y pi_Z(y) p(y, x)| with pi_Z(x) = pi(x) q(x)."""
    interior, boundary, preds = split_window(spec, window)
    if not interior:
        raise ValueError("window has no interior state")
    residuals, scales, skipped = {}, {}, []
    for x in interior:
        pz = pi(x) * spec.total_rate(x)
        inflow = math.fsum(pi(y) * spec.total_rate(y) * embedded_transition(spec, y, x) for y in preds[x])
        if pz + inflow < UNDERFLOW_SCALE and (pz > 0 or inflow > 0):
            skipped.append(x)
            continue
        residuals[x] = abs(pz - inflow)
        scales[x] = pz + inflow
    return BalanceResidual(residuals, scales, interior, boundary, skipped)


def generator_expectation(spec: CtmcSpec, pi, f: FiniteSupportFunction) -> tuple[float, float]:
    """sum_x pi(x) (Af)(x) and the scale sum_x pi(x) q(x) max|f|.

    Only states in the support of ``f`` or with a jump into it contribute.
    """
    support = {as_state(x) for x, v in f.items() if v != 0}
    f = {as_state(x): v for x, v in f.items()}
    states = set(support)
    for z in support:
        states.update(spec.predecessors(z))
    fmax = max((abs(v) for v in f.values()), default=0.0)
    terms, scale = [], []
    for x in states:
        px = pi(x)
        terms.append(px * apply_generator(spec, f, x))
        scale.append(px * spec.total_rate(x))
    return math.fsum(terms), math.fsum(scale) * fmax


# -- expected jump rate --------------------------------------------------------


@dataclass(frozen=True)
class JumpRate:
    """sum_x pi(x) q(x): the stationary expected number of jumps per unit time."""

    value: float
    lower: float
    upper: float
    verdict: SeriesVerdict
    method: str
    series: Optional[SeriesResult] = None

    @property
    def finite(self) -> bool:
        return self.verdict is SeriesVerdict.FINITE


def poisson_factorial_moment(c: float, order: int, cutoff: int) -> float:
    """Truncated sum_{x <= cutoff} Poisson(c)(x) x! / (x - order)!."""
    terms = []
    for x in range(order, cutoff + 1):
        logp = x * math.log(c) - c - math.lgamma(x + 1)
        terms.append(math.exp(logp) * falling_factorial(x, order))
    return math.fsum(terms)


def truncated_jump_rate(spec: CtmcSpec, pi, window: Iterable) -> float:
    return math.fsum(pi(x) * spec.total_rate(x) for x in (as_state(s) for s in window))


def expected_jump_rate(spec: CtmcSpec, pi: StationaryMeasure, terms: int = DEFAULT_TERMS, window=None) -> JumpRate:
    """Classify sum_x pi(x) q(x).

    Product-form Poisson measures on mass-action chains use the
    falling-factorial moment identity E[x!/(x-y)!] = c^y, giving
    sum_k kappa_k c^{y_k}. Birth-death measures go through the series
    analysis; explicit tables are summed exactly. Anything else is
    summed over ``window`` and reported inconclusive.
    """
    if pi.kind == "product-poisson" and spec.network is not None:
        c = np.array(pi.params["c"])
        value = math.fsum(r.rate_constant * float(np.prod(c ** np.array(r.source))) for r in spec.network.reactions)
        return JumpRate(value, value, value, SeriesVerdict.FINITE, "Poisson moment identity")
    if pi.kind == "table":
        value = truncated_jump_rate(spec, pi, pi.params["table"])
        return JumpRate(value, value, value, SeriesVerdict.FINITE, "finite support")
    if pi.kind == "birth-death":
        if pi.normalizable is not SeriesVerdict.FINITE:
            return JumpRate(math.inf, math.inf, math.inf, SeriesVerdict.INCONCLUSIVE, "measure not normalizable")
        lowest = pi.params["lowest"]
        birth, death = pi.params["birth"], pi.params["death"]

        def q(x):
            return birth(x) + (death(x) if x > lowest else 0)

        if q(lowest) == 0:
            raise ValueError("base state is absorbing")

        def ratio(n: int) -> float:
            return log_ratio(birth(n), death(n + 1)) + log_ratio(q(n + 1), q(n))

        # reuse the cached log pi grid; only log q is new
        log_q = np.fromiter((log_ratio(q(x), 1) for x in range(lowest, lowest + terms)), dtype=float, count=terms)
        logs = pi.params["log_weights"](lowest + terms - 1) - math.log(pi.normalization.value) + log_q
        s = analyze_series(float(logs[0]), ratio, lowest, terms, logs=logs)
        upper = s.upper
        return JumpRate(s.value, s.lower, upper, s.verdict, "series: " + s.test, series=s)
    if window is None:
        return JumpRate(math.nan, 0.0, math.inf, SeriesVerdict.INCONCLUSIVE, "no tail analysis available")
    value = truncated_jump_rate(spec, pi, window)
    return JumpRate(value, value, math.inf, SeriesVerdict.INCONCLUSIVE, "truncated sum only")


@dataclass(frozen=True)
class EmbeddedMeasure:
    mass: Callable[[State], float]
    normalizable: SeriesVerdict
    jump_rate: JumpRate

    def __call__(self, x) -> float:
        return self.mass(as_state(x))


def embedded_measure(spec: CtmcSpec, pi: StationaryMeasure, terms: int = DEFAULT_TERMS, window=None) -> EmbeddedMeasure:
    """x -> pi(x) q(x); normalizable exactly when the expected jump rate is finite."""
    rate = expected_jump_rate(spec, pi, terms=terms, window=window)
    return EmbeddedMeasure(lambda x: pi(x) * spec.total_rate(x), rate.verdict, rate)
