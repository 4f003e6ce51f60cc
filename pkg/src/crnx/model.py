"""Reaction networks and generic countable-state CTMC rate oracles.

States are tuples of ints. Reaction networks restrict states to the
non-negative orthant; a :class:`CtmcSpec` built by hand may use signed
coordinates (e.g. chains on the integers).
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

State = tuple[int, ...]
Complex = tuple[int, ...]


def falling_factorial(x: int, k: int) -> int:
    """x (x-1) ... (x-k+1) as an exact int; zero when x < k."""
    if k < 0:
        raise ValueError("order must be non-negative")
    if x < k:
        return 0
    out = 1
    for j in range(k):
        out *= x - j
    return out


def to_float(value) -> float:
    # ints beyond the float range saturate; precision drops to 53 bits above 2**53
    try:
        return float(value)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class Reaction:
    source: Complex
    product: Complex
    rate_constant: float

    def __post_init__(self):
        source = tuple(int(v) for v in self.source)
        product = tuple(int(v) for v in self.product)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "product", product)
        if len(source) != len(product):
            raise ValueError("source and product complexes differ in length")
        if any(v < 0 for v in source + product):
            raise ValueError("stoichiometric coefficients must be non-negative")
        if source == product:
            raise ValueError(f"self-loop reaction {source} -> {product} is not allowed")
        k = self.rate_constant
        if isinstance(k, bool) or not (isinstance(k, numbers.Real) and math.isfinite(k) and k > 0):
            raise ValueError(f"rate constant must be a positive finite number, got {k!r}")

    @property
    def vector(self) -> tuple[int, ...]:
        return reaction_vector(self)

    def reversed(self, rate_constant: Optional[float] = None) -> "Reaction":
        k = self.rate_constant if rate_constant is None else rate_constant
        return Reaction(self.product, self.source, k)


def reaction_vector(r: Reaction) -> tuple[int, ...]:
    """Net change in counts when ``r`` fires: product minus source."""
    return tuple(p - s for s, p in zip(r.source, r.product))


@dataclass(frozen=True)
class ReactionNetwork:
    """Species names plus a list of mass-action reactions.

    Rate constants live on the reactions, so a network doubles as a
    mass-action system (stochastic or deterministic).
    """

    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if not self.species:
            raise ValueError("a network needs at least one species")
        if not self.reactions:
            raise ValueError("a network needs at least one reaction")
        if len(set(self.species)) != len(self.species):
            raise ValueError("species names must be distinct")
        seen = set()
        for r in self.reactions:
            if len(r.source) != len(self.species):
                raise ValueError(f"complex {r.source} does not match {len(self.species)} species")
            key = (r.source, r.product)
            if key in seen:
                raise ValueError(f"duplicate reaction {r.source} -> {r.product}")
            seen.add(key)

    @property
    def dimension(self) -> int:
        return len(self.species)

    @property
    def complexes(self) -> tuple[Complex, ...]:
        """Distinct complexes in order of first appearance."""
        out = {}
        for r in self.reactions:
            out.setdefault(r.source, None)
            out.setdefault(r.product, None)
        return tuple(out)

    @property
    def reaction_vectors(self) -> tuple[tuple[int, ...], ...]:
        return tuple(reaction_vector(r) for r in self.reactions)

    def intensity(self, k: int, x: Sequence[int]) -> float:
        r = self.reactions[k]
        ff = 1
        for xi, yi in zip(x, r.source):
            if xi < yi:
                return 0.0
            ff *= falling_factorial(xi, yi)
        return r.rate_constant * to_float(ff)

    def complex_label(self, y: Complex) -> str:
        terms = []
        for name, v in zip(self.species, y):
            if v == 1:
                terms.append(name)
            elif v > 1:
                terms.append(f"{v}{name}")
        return " + ".join(terms) if terms else "0"


Neighbors = Callable[[State], list[tuple[State, float]]]


@dataclass(frozen=True)
class CtmcSpec:
    """Countable-state CTMC given by a transition-rate oracle.

    ``neighbors(x)`` returns the finite list of ``(y, q(x, y))`` with
    ``y != x`` and ``q(x, y) > 0``. ``increments`` is the finite set of
    possible jumps ``y - x`` when known; it lets callers enumerate the
    possible predecessors of a state. ``network`` is set for specs built
    by :func:`as_ctmc` so mass-action fast paths can be used.
    """

    dimension: int
    neighbors: Neighbors
    increments: Optional[tuple[State, ...]] = None
    name: str = ""
    network: Optional[ReactionNetwork] = field(default=None, compare=False)

    def total_rate(self, x: State) -> float:
        return math.fsum(rate for _, rate in self.neighbors(x))

    def rate(self, x: State, y: State) -> float:
        for target, rate in self.neighbors(x):
            if target == y:
                return rate
        return 0.0

    def predecessors(self, x: State) -> list[State]:
        """States ``y`` with ``q(y, x) > 0``."""
        if self.increments is None:
            raise ValueError(f"chain {self.name or '<anonymous>'} does not declare its increments")
        out = []
        for v in self.increments:
            y = tuple(a - b for a, b in zip(x, v))
            if self.rate(y, x) > 0:
                out.append(y)
        return out


def as_ctmc(net: ReactionNetwork) -> CtmcSpec:
    """Stochastic mass-action chain of ``net``.

    Reactions sharing a reaction vector are merged into one transition.
    """
    vectors = net.reaction_vectors
    groups: dict[tuple[int, ...], list[int]] = {}
    for k, v in enumerate(vectors):
        groups.setdefault(v, []).append(k)
    items = list(groups.items())

    def neighbors(x: State) -> list[tuple[State, float]]:
        if any(v < 0 for v in x):
            return []
        out = []
        for v, ks in items:
            rate = math.fsum(net.intensity(k, x) for k in ks)
            if rate > 0:
                out.append((tuple(a + b for a, b in zip(x, v)), rate))
        return out

    return CtmcSpec(
        dimension=net.dimension,
        neighbors=neighbors,
        increments=tuple(groups),
        name="mass-action",
        network=net,
    )


def as_state(x) -> State:
    if isinstance(x, (int,)) or (hasattr(x, "__index__") and not hasattr(x, "__len__")):
        return (int(x),)
    return tuple(int(v) for v in x)
