"""Text format for reaction networks (``.crn`` files).

One statement per line, ``#`` starts a comment::

    species A, B            # optional; fixes the species order
    0 <-> A : 1, 1          # reversible: forward constant first
    A + B -> 3B : 1

A complex is a ``+``-separated sum of optionally weighted identifiers
(``3B`` or ``3 B``); ``0`` is the empty complex. Without a ``species``
line, species are ordered by first appearance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .model import Reaction, ReactionNetwork

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")
_NUMBER = re.compile(r"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?")


class CrnSyntaxError(ValueError):
    """Malformed network text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int, text: str = ""):
        self.message = message
        self.line = line
        self.column = column
        self.text = text
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass
class _Cursor:
    text: str
    line: int
    pos: int = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def take(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def match(self, pattern: re.Pattern) -> Optional[str]:
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group(0)

    def error(self, message: str) -> CrnSyntaxError:
        return CrnSyntaxError(message, self.line, self.pos + 1, self.text)


def _parse_complex(cur: _Cursor) -> dict[str, int]:
    start = cur.pos
    cur.skip_ws()
    if cur.match(re.compile(r"0(?![0-9A-Za-z_])")) is not None:
        return {}
    terms: dict[str, int] = {}
    while True:
        cur.skip_ws()
        coef_txt = cur.match(_INT)
        coef = int(coef_txt) if coef_txt is not None else 1
        name = cur.match(_IDENT)
        if name is None:
            if coef_txt is not None and coef == 0:
                raise cur.error("the empty complex must be written as '0'")
            raise cur.error("expected a species name")
        if coef == 0:
            raise cur.error(f"zero coefficient for {name}; write the empty complex as '0'")
        terms[name] = terms.get(name, 0) + coef
        if not cur.take("+"):
            break
    if cur.pos == start:
        raise cur.error("expected a complex")
    return terms


def _parse_constant(cur: _Cursor) -> float:
    txt = cur.match(_NUMBER)
    if txt is None:
        raise cur.error("expected a rate constant")
    value = float(txt)
    if not value > 0 or value == float("inf"):
        raise cur.error(f"rate constant must be positive and finite, got {txt}")
    return value


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_network(text: str) -> ReactionNetwork:
    """Parse ``.crn`` text into a :class:`ReactionNetwork`.

    Raises :class:`CrnSyntaxError` with the offending location.
    """
    declared: Optional[list[str]] = None
    raw: list[tuple[dict, dict, float, int, int]] = []
    order: dict[str, None] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(line.rstrip("\r"))
        if not line.strip():
            continue
        cur = _Cursor(line, lineno)
        if re.match(r"\s*species\b(?!.*->)", line):
            cur.take("species")
            names = []
            while not cur.at_end():
                name = cur.match(_IDENT)
                if name is None:
                    raise cur.error("expected a species name")
                names.append(name)
                if not cur.at_end() and not cur.take(","):
                    raise cur.error("expected ','")
            if declared is not None:
                raise cur.error("species declared twice")
            if len(set(names)) != len(names) or not names:
                raise cur.error("species list must be non-empty and distinct")
            declared = names
            continue
        lhs = _parse_complex(cur)
        col = cur.pos + 1
        if cur.take("<->"):
            reversible = True
        elif cur.take("->"):
            reversible = False
        else:
            raise cur.error("expected '->' or '<->'")
        rhs = _parse_complex(cur)
        if not cur.take(":"):
            raise cur.error("expected ':' before rate constants")
        k1 = _parse_constant(cur)
        k2 = None
        if cur.take(","):
            k2 = _parse_constant(cur)
        if not cur.at_end():
            raise cur.error("unexpected trailing text")
        if reversible and k2 is None:
            raise cur.error("reversible reaction needs two rate constants")
        if not reversible and k2 is not None:
            raise cur.error("irreversible reaction takes one rate constant")
        for name in list(lhs) + list(rhs):
            order.setdefault(name, None)
        raw.append((lhs, rhs, k1, lineno, col))
        if reversible:
            raw.append((rhs, lhs, k2, lineno, col))

    if not raw:
        raise CrnSyntaxError("no reactions found", 1, 1)
    if declared is None:
        species = list(order)
    else:
        missing = [s for s in order if s not in declared]
        if missing:
            raise CrnSyntaxError(f"undeclared species {', '.join(missing)}", raw[0][3], 1)
        species = declared
    index = {s: i for i, s in enumerate(species)}

    def vec(terms: dict[str, int]) -> tuple[int, ...]:
        v = [0] * len(species)
        for name, c in terms.items():
            v[index[name]] = c
        return tuple(v)

    reactions = []
    seen = set()
    for lhs, rhs, k, lineno, col in raw:
        y, yp = vec(lhs), vec(rhs)
        if y == yp:
            raise CrnSyntaxError("reaction has identical source and product", lineno, col)
        if (y, yp) in seen:
            raise CrnSyntaxError("duplicate reaction; merge the rate constants", lineno, col)
        seen.add((y, yp))
        reactions.append(Reaction(y, yp, k))
    return ReactionNetwork(tuple(species), tuple(reactions))


def read_network(path) -> ReactionNetwork:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_network(fh.read())


def _fmt_const(k: float) -> str:
    return repr(float(k))


def format_network(net: ReactionNetwork) -> str:
    """Render ``net`` so that ``parse_network`` gives it back.

    A reaction immediately followed by its reverse is written as one
    ``<->`` line, which keeps the reaction order intact.
    """
    lines = ["species " + ", ".join(net.species)]
    rs = net.reactions
    i = 0
    while i < len(rs):
        r = rs[i]
        lhs, rhs = net.complex_label(r.source), net.complex_label(r.product)
        if i + 1 < len(rs) and (rs[i + 1].source, rs[i + 1].product) == (r.product, r.source):
            lines.append(f"{lhs} <-> {rhs} : {_fmt_const(r.rate_constant)}, {_fmt_const(rs[i + 1].rate_constant)}")
            i += 2
        else:
            lines.append(f"{lhs} -> {rhs} : {_fmt_const(r.rate_constant)}")
            i += 1
    return "\n".join(lines) + "\n"
