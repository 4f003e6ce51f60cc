"""Hand-built chains: birth-death processes with polynomial rates and the
two-stationary-distribution chain on the integers."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .model import CtmcSpec, ReactionNetwork, State

RateFn = Callable[[int], object]


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in one variable with exact rational coefficients (lowest degree first)."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = [Fraction(c) for c in self.coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        coeffs = coeffs or [Fraction(0)]
        object.__setattr__(self, "coefficients", tuple(coeffs))
        # integer numerators over a common denominator keep evaluation in int arithmetic
        den = math.lcm(*(c.denominator for c in coeffs))
        object.__setattr__(self, "_den", den)
        object.__setattr__(self, "_num", tuple(int(c * den) for c in coeffs))
        object.__setattr__(self, "_float", tuple(float(c) for c in coeffs))

    @classmethod
    def falling(cls, k: int) -> "Polynomial":
        """x (x-1) ... (x-k+1)."""
        out = cls((1,))
        for j in range(k):
            out = out * cls((-j, 1))
        return out

    @classmethod
    def parse(cls, text: str, variable: str = "x") -> "Polynomial":
        """Parse e.g. ``x^2*(x-1)^2``; only integer coefficients are accepted."""
        if not re.fullmatch(rf"[\s0-9{variable}+\-*^()]+", text):
            raise ValueError(f"not a polynomial in {variable}: {text!r}")
        import sympy

        sym = sympy.Symbol(variable)
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals={variable: sym})
            poly = sympy.Poly(expr, sym)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError) as exc:
            raise ValueError(f"not a polynomial in {variable}: {text!r}") from exc
        coeffs = []
        for c in reversed(poly.all_coeffs()):
            if not c.is_integer:
                raise ValueError(f"non-integer coefficient {c} in {text!r}")
            coeffs.append(Fraction(int(c)))
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        if isinstance(x, int):
            acc = 0
            for c in reversed(self._num):
                acc = acc * x + c
            return acc if self._den == 1 else Fraction(acc, self._den)
        acc = 0.0
        for c in reversed(self._float):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (Fraction(0),) * (n - len(self.coefficients))
        b = other.coefficients + (Fraction(0),) * (n - len(other.coefficients))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(tuple(c * Fraction(other) for c in self.coefficients))
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __str__(self) -> str:
        terms = []
        for k, c in reversed(list(enumerate(self.coefficients))):
            if c == 0:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def birth_death_chain(birth: RateFn, death: RateFn, lowest: int = 0, name: str = "birth-death") -> CtmcSpec:
    """Chain on {lowest, lowest+1, ...} with q(x, x+1) = birth(x), q(x, x-1) = death(x)."""

    def neighbors(s: State):
        (x,) = s
        if x < lowest:
            return []
        out = []
        up = birth(x)
        if up > 0:
            out.append(((x + 1,), float(up)))
        if x > lowest:
            down = death(x)
            if down > 0:
                out.append(((x - 1,), float(down)))
        return out

    return CtmcSpec(1, neighbors, increments=((1,), (-1,)), name=name)


def pure_birth_chain(birth: RateFn, lowest: int = 0, name: str = "pure-birth") -> CtmcSpec:
    return birth_death_chain(birth, lambda x: 0, lowest, name)


def birth_death_rates(net: ReactionNetwork) -> Optional[tuple[Polynomial, Polynomial]]:
    """Birth and death rate polynomials of a one-species network with +-1 jumps.

    Returns ``None`` when the network is not of that shape.
    """
    if net.dimension != 1:
        return None
    birth = Polynomial((0,))
    death = Polynomial((0,))
    for r in net.reactions:
        (v,) = r.vector
        term = Polynomial.falling(r.source[0]) * Fraction(r.rate_constant)
        if v == 1:
            birth = birth + term
        elif v == -1:
            death = death + term
        else:
            return None
    return birth, death


def lowest_closed_state(birth: RateFn, death: RateFn, search: int = 1000) -> Optional[int]:
    """Smallest x >= 0 with birth(x) > 0 and death(x) == 0, i.e. the bottom of
    an upward-infinite closed class."""
    for x in range(search):
        if birth(x) > 0:
            return x if death(x) == 0 else None
    return None


# chain on Z with two distinct constant solutions of the forward equation


def _z_rates(n: int):
    out = []
    if n >= 0:
        out.append(((n + 1,), float(4**n)))
    if n >= 1:
        out.append(((n - 1,), 4**n / 2))
    if n <= -1:
        out.append(((n + 1,), 4 ** (-n) / 2))
    if n <= 0:
        out.append(((n - 1,), float(4 ** (-n))))
    return out


def integer_line_chain() -> CtmcSpec:
    return CtmcSpec(1, lambda s: _z_rates(s[0]), increments=((1,), (-1,)), name="integer-line")


def integer_line_pi1(s: State) -> float:
    (n,) = s
    return math.ldexp(1.0, -abs(n)) / 3


def integer_line_pi2(s: State) -> float:
    (n,) = s
    if n >= 0:
        return math.ldexp(1.0, -2 * n) / 3
    m = -n
    return (2.0 ** (m + 1) - 1) * math.ldexp(1.0, -2 * m) / 3


def pure_birth_network(name: str = "A") -> ReactionNetwork:
    """A -> 2A and 2A -> 3A with unit constants: birth rate x + x(x-1) = x^2."""
    from .model import Reaction

    return ReactionNetwork((name,), (Reaction((1,), (2,), 1.0), Reaction((2,), (3,), 1.0)))

