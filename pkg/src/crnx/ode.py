"""Adaptive Dormand-Prince 5(4) integration with finite-time blow-up detection.

Blow-up is declared when the solution norm has passed
``blow_up_threshold`` and the controller can no longer take a step of at
least ``h_min``. Near a power-law singularity ``|z| ~ C (T* - t)^(-1/(p-1))``
the remaining time is ``|z| / ((p - 1) |z'|)``; ``p`` is read off the last
two accepted steps as ``d log|z'| / d log|z|``.

Step-size collapse below the threshold is a blow-up only when the last
steps show such a singularity less than ``100 * h_min`` ahead (fast
singularities like ``z' = z^3`` run out of time resolution before the
norm gets large); ``threshold_reached`` records which case applied. Any
other collapse is reported as :class:`StiffnessError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .kinetics import MassActionField
from .model import ReactionNetwork

# Dormand-Prince tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class StiffnessError(RuntimeError):
    """Step size fell below h_min while the solution stayed bounded."""


@dataclass(frozen=True)
class OdeConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    blow_up_threshold: float = 1e8
    h_min: float = 1e-12
    h0: Optional[float] = None
    max_steps: int = 1_000_000

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.h_min > 0 and self.blow_up_threshold > 0):
            raise ValueError("tolerances, h_min and blow_up_threshold must be positive")


@dataclass
class OdeResult:
    times: np.ndarray
    states: np.ndarray
    blow_up: bool
    blow_up_time: Optional[float] = None
    blow_up_bracket: Optional[tuple[float, float]] = None
    growth_exponent: Optional[float] = None
    threshold_reached: bool = False

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def summary(self) -> str:
        if self.blow_up:
            lo, hi = self.blow_up_bracket
            return f"blow-up at t ~ {self.blow_up_time:.9g} (bracket [{lo:.9g}, {hi:.9g}])"
        return f"integrated to t={self.final_time:.6g}, state {np.array2string(self.final_state, precision=8)}"


def _initial_step(f, t0, z0, f0, order, rtol, atol):
    scale = atol + np.abs(z0) * rtol
    d0 = np.linalg.norm(z0 / scale) / math.sqrt(len(z0))
    d1 = np.linalg.norm(f0 / scale) / math.sqrt(len(z0))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    f1 = f(t0 + h0, z0 + h0 * f0)
    d2 = np.linalg.norm((f1 - f0) / scale) / math.sqrt(len(z0)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / (order + 1))
    return min(100 * h0, h1)


def ode_integrate(
    system: Union[ReactionNetwork, Callable],
    z0,
    t_end: float,
    cfg: OdeConfig = OdeConfig(),
) -> OdeResult:
    """Integrate ``z' = f(t, z)`` from 0 to ``t_end``.

    ``system`` is a network (deterministic mass-action right-hand side)
    or a callable ``f(t, z)``.
    """
    f = MassActionField(system) if isinstance(system, ReactionNetwork) else system
    z = np.array(z0, dtype=float)
    if z.ndim != 1:
        raise ValueError("z0 must be a vector")
    if isinstance(system, ReactionNetwork):
        if len(z) != system.dimension:
            raise ValueError("z0 dimension does not match the network")
        if np.any(z < 0):
            raise ValueError("concentrations must be non-negative")
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    t = 0.0
    k = np.empty((7, len(z)))
    k[0] = f(t, z)
    h = cfg.h0 or _initial_step(f, t, z, k[0], 5, cfg.rtol, cfg.atol)
    times, states, slopes = [t], [z.copy()], [k[0].copy()]
    steps = 0
    while t < t_end:
        if steps >= cfg.max_steps:
            raise RuntimeError(f"step budget exhausted at t={t}")
        h = min(h, t_end - t)
        if h < cfg.h_min and t_end - t > cfg.h_min:
            return _collapse(times, states, slopes, cfg)
        for s in range(1, 7):
            k[s] = f(t + _C[s] * h, z + h * (_A[s] @ k[:s]))
        z_new = z + h * (_B5 @ k)
        err_vec = h * (_E @ k)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(z), np.abs(z_new))
        with np.errstate(over="ignore", invalid="ignore"):
            err = float(np.sqrt(np.mean((err_vec / scale) ** 2)))
        if not np.isfinite(err) or not np.all(np.isfinite(z_new)):
            h *= 0.2
            continue
        if err <= 1.0:
            steps += 1
            t = t + h if t_end - (t + h) > 1e-15 * max(1.0, t_end) else t_end
            z = z_new
            k[0] = k[6]  # first-same-as-last
            times.append(t)
            states.append(z.copy())
            slopes.append(k[0].copy())
            factor = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
        else:
            factor = max(0.2, 0.9 * err ** -0.2)
        h *= factor
    return OdeResult(np.array(times), np.array(states), blow_up=False)


def _collapse(times, states, slopes, cfg: OdeConfig) -> OdeResult:
    z = states[-1]
    norm = float(np.max(np.abs(z)))
    t_last = times[-1]
    p, remaining = math.nan, math.inf
    if len(states) >= 2:
        n1, n0 = np.linalg.norm(z), np.linalg.norm(states[-2])
        d1, d0 = np.linalg.norm(slopes[-1]), np.linalg.norm(slopes[-2])
        if n1 > n0 > 0 and d1 > d0 > 0:
            p = math.log(d1 / d0) / math.log(n1 / n0)
            if p > 1:
                remaining = n1 / ((p - 1) * d1)
    reached = norm > cfg.blow_up_threshold
    # below the threshold, accept only a growing power-law singularity the step size cannot resolve
    if not reached and not remaining <= 100 * cfg.h_min:
        raise StiffnessError(f"step size below h_min={cfg.h_min} at t={t_last} with |z|={norm:.3g}")
    if not math.isfinite(remaining):
        remaining = 0.0
    return OdeResult(
        np.array(times),
        np.array(states),
        blow_up=True,
        blow_up_time=t_last + remaining,
        blow_up_bracket=(t_last, t_last + 2 * remaining + cfg.h_min),
        growth_exponent=p,
        threshold_reached=reached,
    )
