"""Mass-action intensities, the CTMC generator and the deterministic vector field."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .model import CtmcSpec, ReactionNetwork, State

# A finite-support function on states; missing keys (and the cemetery) map to 0.
FiniteSupportFunction = Mapping[State, float]


def stochastic_intensity(net: ReactionNetwork, k: int, x: Sequence[int]) -> float:
    """kappa_k * x! / (x - y_k)!, or 0 when some species is short of y_k."""
    return net.intensity(k, x)


def deterministic_rate(net: ReactionNetwork, k: int, z: Sequence[float]) -> float:
    r = net.reactions[k]
    out = float(r.rate_constant)
    for zi, yi in zip(z, r.source):
        if yi:
            out *= float(zi) ** yi
    return out


def total_rate(spec: CtmcSpec, x: State) -> float:
    return spec.total_rate(x)


def total_intensity(net: ReactionNetwork, x: Sequence[int]) -> float:
    return math.fsum(net.intensity(k, x) for k in range(len(net.reactions)))


def apply_generator(spec: CtmcSpec, f: FiniteSupportFunction, x: State) -> float:
    """(Af)(x) = sum_y q(x, y) (f(y) - f(x))."""
    fx = f.get(x, 0.0)
    terms = []
    for y, rate in spec.neighbors(x):
        terms.append(rate * (f.get(y, 0.0) - fx))
    return math.fsum(terms)


class MassActionField:
    """Vectorised deterministic mass-action right-hand side."""

    def __init__(self, net: ReactionNetwork):
        self.net = net
        self.sources = np.array([r.source for r in net.reactions], dtype=float)
        self.vectors = np.array(net.reaction_vectors, dtype=float)
        self.kappa = np.array([r.rate_constant for r in net.reactions], dtype=float)

    def rates(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        # numpy gives 0.0 ** 0 == 1.0, matching the 0^0 = 1 convention
        return self.kappa * np.prod(z[None, :] ** self.sources, axis=1)

    def __call__(self, t, z) -> np.ndarray:
        return self.rates(z) @ self.vectors


def ode_rhs(net: ReactionNetwork, z) -> np.ndarray:
    """sum_k zeta_k * kappa_k * z^{y_k}."""
    return MassActionField(net)(0.0, z)
