"""Explosion and recurrence verdicts.

Four criteria are combined:

* a finite stationary expected jump rate ``sum_x pi(x) q(x)`` for a
  verified constant solution ``pi`` certifies non-explosion (for initial
  laws supported inside ``supp pi``);
* complex balanced mass-action systems get that certificate through their
  product-form Poisson measure;
* one-dimensional birth-death chains are classified from the embedded
  chain's escape series together with the detailed-balance measure;
* two distinct constant solutions on one irreducible class force explosion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .chains import birth_death_chain, birth_death_rates, lowest_closed_state
from .model import CtmcSpec, ReactionNetwork, as_ctmc, as_state
from .series import SeriesResult, SeriesVerdict, analyze_series, log_ratio
from .stationary import (
    DEFAULT_TERMS,
    JumpRate,
    StationaryMeasure,
    balance_residual,
    birth_death_stationary,
    box_window,
    expected_jump_rate,
    interval_window,
    product_form_poisson,
)
from .structure import find_complex_balanced_equilibrium, structural_obstruction

SUPPORT_NOTE = "non-explosion holds for initial distributions supported in supp(pi)"


class Verdict(str, Enum):
    NON_EXPLOSIVE_CERTIFIED = "non-explosive-certified"
    EXPLOSIVE = "explosive"
    POSITIVE_RECURRENT = "positive-recurrent"
    RECURRENT = "recurrent"
    TRANSIENT_EMBEDDED = "transient-embedded"
    INCONCLUSIVE = "inconclusive"
    STATIONARY_DISTRIBUTION_EXISTS = "stationary-distribution-exists"


class InconsistentVerdict(RuntimeError):
    """Raised when a report would carry both a certificate and an explosion verdict."""


@dataclass(frozen=True)
class Evidence:
    """One numeric claim behind a verdict.

    ``bound`` is the (lower, upper) bracket or tolerance attached to
    ``value``; ``criterion`` names the test used.
    """

    criterion: str
    value: float
    bound: tuple[float, float]
    detail: str = ""


@dataclass(frozen=True)
class Certificate:
    jump_rate: JumpRate
    measure: StationaryMeasure
    balance_max_scaled: float
    window_size: int
    equilibrium: Optional[tuple[float, ...]] = None
    note: str = SUPPORT_NOTE

    def evidence(self) -> list[Evidence]:
        return [
            Evidence("stationary balance on window", self.balance_max_scaled, (0.0, self.balance_max_scaled),
                     f"{self.window_size} states, {self.measure.description}"),
            Evidence("finite expected jump rate", self.jump_rate.value,
                     (self.jump_rate.lower, self.jump_rate.upper), self.jump_rate.method),
        ]


@dataclass
class ClassificationReport:
    verdicts: tuple[Verdict, ...]
    evidence: tuple[Evidence, ...]
    note: str = ""
    measure: Optional[StationaryMeasure] = field(default=None, compare=False)
    certificate: Optional[Certificate] = field(default=None, compare=False)

    def __post_init__(self):
        self.verdicts = tuple(dict.fromkeys(Verdict(v) for v in self.verdicts)) or (Verdict.INCONCLUSIVE,)
        self.evidence = tuple(self.evidence)
        if not self.evidence:
            raise ValueError("a verdict needs at least one piece of evidence")
        if Verdict.NON_EXPLOSIVE_CERTIFIED in self.verdicts and Verdict.EXPLOSIVE in self.verdicts:
            raise InconsistentVerdict("report is both certified non-explosive and explosive")
        if Verdict.INCONCLUSIVE in self.verdicts and len(self.verdicts) > 1:
            self.verdicts = tuple(v for v in self.verdicts if v is not Verdict.INCONCLUSIVE)

    def has(self, v: Verdict) -> bool:
        return Verdict(v) in self.verdicts

    @property
    def tags(self) -> list[str]:
        return [v.value for v in self.verdicts]


def _series_evidence(name: str, s: SeriesResult) -> Evidence:
    return Evidence(name, s.value, s.bracket, f"{s.verdict.value}: {s.test}, {s.end - s.start + 1} terms")


# -- certificates ---------------------------------------------------------------


def certify_nonexplosive(
    spec: CtmcSpec,
    pi: StationaryMeasure,
    window,
    tol: float = 1e-8,
    terms: int = DEFAULT_TERMS,
    equilibrium=None,
) -> Optional[Certificate]:
    """Certificate when ``pi`` balances on ``window`` and its jump rate is finite."""
    window = [as_state(x) for x in window]
    try:
        bal = balance_residual(spec, pi, window)
    except ValueError:
        return None
    if not bal.passes(tol):
        return None
    rate = expected_jump_rate(spec, pi, terms=terms, window=window)
    if not rate.finite:
        return None
    eq = None if equilibrium is None else tuple(float(v) for v in equilibrium)
    return Certificate(rate, pi, bal.max_scaled, len(window), eq)


def default_box(dimension: int, states: int = 2000, side: int = 30) -> list:
    """Box {0..n}^d with n <= side and at most about ``states`` points."""
    n = max(2, min(side, int(states ** (1.0 / dimension)) - 1))
    return box_window([n] * dimension)


def certify_complex_balanced_nonexplosive(
    net: ReactionNetwork, window=None, tol: float = 1e-8, seed: int = 0
) -> Optional[Certificate]:
    """Complex balanced equilibrium -> product Poisson measure -> certificate."""
    c = find_complex_balanced_equilibrium(net, seed=seed)
    if c is None:
        return None
    spec = as_ctmc(net)
    pi = product_form_poisson(c)
    window = default_box(net.dimension) if window is None else window
    return certify_nonexplosive(spec, pi, window, tol, equilibrium=c)


# -- birth-death criteria -------------------------------------------------------


def bd_embedded_series(birth, death, start: int, terms: int = DEFAULT_TERMS) -> SeriesResult:
    """sum_{n >= start} prod_{x=start}^{n} death(x) / birth(x).

    Finite means the embedded jump chain is transient (drifts upward),
    infinite means it is recurrent.
    """
    for x in (start, start + terms // 2, start + terms):
        if not birth(x) > 0:
            raise ValueError(f"birth rate must be positive from {start} on (x={x})")
    log_first = log_ratio(death(start), birth(start))
    return analyze_series(log_first, lambda n: log_ratio(death(n + 1), birth(n + 1)), start, terms)


def pure_birth_explosion_test(birth, start: int, terms: int = DEFAULT_TERMS) -> tuple[Optional[bool], SeriesResult]:
    """Explosive iff sum_{x >= start} 1 / birth(x) is finite; ``None`` if undecided."""
    if not birth(start) > 0:
        raise ValueError(f"birth rate must be positive from {start} on")
    s = analyze_series(-log_ratio(birth(start), 1), lambda n: log_ratio(birth(n), birth(n + 1)), start, terms)
    if s.verdict is SeriesVerdict.FINITE:
        return True, s
    if s.verdict is SeriesVerdict.DIVERGENT:
        return False, s
    return None, s


def _classify_pure_birth(birth, lowest: int, terms: int) -> ClassificationReport:
    # no deaths on the window: the jump chain marches upward, so it is transient
    explosive, s = pure_birth_explosion_test(birth, lowest, terms)
    verdicts = [Verdict.TRANSIENT_EMBEDDED]
    if explosive:
        verdicts.append(Verdict.EXPLOSIVE)
    return ClassificationReport(
        tuple(verdicts),
        (_series_evidence("mean holding time sum", s),),
        note=f"pure birth chain from {lowest}" + ("" if explosive is not None else "; holding time sum undecided"),
    )


def classify_birth_death(
    birth,
    death,
    lowest: Optional[int] = None,
    window: int = 200,
    terms: int = DEFAULT_TERMS,
    tol: float = 1e-8,
) -> ClassificationReport:
    """Combine the embedded series, the detailed-balance measure and the certificate.

    The chain lives on ``{lowest, lowest+1, ...}``; by default ``lowest``
    is the bottom of the closed class (first state with a birth and no
    death). ``window`` states above ``lowest`` are used for the balance
    and support checks.
    """
    if lowest is None:
        lowest = lowest_closed_state(birth, death)
        if lowest is None:
            raise ValueError("no closed class bounded below: need birth(x) > 0 and death(x) == 0 at the base")
    if all(death(x) == 0 for x in range(lowest, lowest + window + 1)):
        return _classify_pure_birth(birth, lowest, terms)
    spec = birth_death_chain(birth, death, lowest)
    series = bd_embedded_series(birth, death, lowest + 1, terms)
    pi = birth_death_stationary(birth, death, lowest, terms)
    states = interval_window(lowest, lowest + window)
    evidence = [_series_evidence("embedded escape series", series)]
    if pi.normalization is not None:
        evidence.append(_series_evidence("detailed-balance normalization", pi.normalization))
    else:
        evidence.append(Evidence("detailed-balance normalization", math.inf, (0.0, math.inf), pi.normalizable.value))

    normalizable = pi.normalizable is SeriesVerdict.FINITE
    verdicts: list[Verdict] = []
    cert = None
    if normalizable:
        bal = balance_residual(spec, pi, states)
        evidence.append(Evidence("stationary balance on window", bal.max_scaled, (0.0, tol), f"{len(states)} states"))
        balanced = bal.passes(tol)
        log_weight = pi.params["log_weight"]
        supported = all(log_weight(x[0]) > -math.inf for x in states)
        rate = expected_jump_rate(spec, pi, terms=terms)
        evidence.append(Evidence("expected jump rate", rate.value, (rate.lower, rate.upper), rate.method))
        if balanced and rate.finite:
            cert = Certificate(rate, pi, bal.max_scaled, len(states))
            verdicts.append(Verdict.NON_EXPLOSIVE_CERTIFIED)
        if balanced and supported:
            verdicts.append(Verdict.STATIONARY_DISTRIBUTION_EXISTS)
        if series.verdict is SeriesVerdict.FINITE:
            verdicts.append(Verdict.TRANSIENT_EMBEDDED)
            if balanced and supported:
                verdicts.append(Verdict.EXPLOSIVE)
        elif series.verdict is SeriesVerdict.DIVERGENT and balanced:
            verdicts.append(Verdict.POSITIVE_RECURRENT)
    else:
        if series.verdict is SeriesVerdict.FINITE:
            verdicts.append(Verdict.TRANSIENT_EMBEDDED)
        elif series.verdict is SeriesVerdict.DIVERGENT and pi.normalizable is SeriesVerdict.DIVERGENT:
            verdicts.append(Verdict.RECURRENT)
    return ClassificationReport(
        tuple(verdicts),
        tuple(evidence),
        note=(SUPPORT_NOTE if cert else "") + f"; states {lowest}.. (base of the closed class)",
        measure=pi,
        certificate=cert,
    )


# -- several stationary measures ------------------------------------------------


def irreducible_on_window(spec: CtmcSpec, window) -> bool:
    """Every window state reaches every other through window states."""
    states = [as_state(x) for x in window]
    inside = set(states)
    g = nx.DiGraph()
    g.add_nodes_from(states)
    for x in states:
        g.add_edges_from((x, y) for y, rate in spec.neighbors(x) if y in inside and rate > 0)
    return len(states) > 0 and nx.is_strongly_connected(g)


def multiple_stationary_rule(
    spec: CtmcSpec,
    pis: Sequence,
    window,
    tol: float = 1e-10,
    distinct_tol: float = 1e-6,
) -> Optional[ClassificationReport]:
    """Explosive verdict from two distinct balanced measures on one irreducible window."""
    if len(pis) < 2:
        return None
    window = [as_state(x) for x in window]
    if not irreducible_on_window(spec, window):
        return None
    evidence = []
    for i, pi in enumerate(pis):
        bal = balance_residual(spec, pi, window)
        if not bal.passes(tol):
            return None
        evidence.append(Evidence(f"stationary balance of measure {i + 1}", bal.max_scaled, (0.0, tol),
                                 f"{len(bal.interior)} interior states"))
    masses = np.array([[pi(x) for x in window] for pi in pis])
    best = None
    for i in range(len(pis)):
        for j in range(i + 1, len(pis)):
            gap = float(np.max(np.abs(masses[i] - masses[j])))
            if best is None or gap > best[0]:
                best = (gap, i, j)
    gap, i, j = best
    if gap <= distinct_tol:
        return None
    evidence.append(Evidence("distinct stationary measures", gap, (distinct_tol, math.inf),
                             f"measures {i + 1} and {j + 1}, irreducible on window"))
    return ClassificationReport((Verdict.EXPLOSIVE,), tuple(evidence), note="irreducible on window")


# -- whole networks -------------------------------------------------------------


def classify_network(
    net: ReactionNetwork, window: Optional[int] = None, tol: float = 1e-8, terms: int = DEFAULT_TERMS
) -> ClassificationReport:
    """Run every applicable criterion on a mass-action network.

    ``window`` is the box side (or interval length for birth-death chains).
    """
    evidence: list[Evidence] = []
    verdicts: list[Verdict] = []
    cert = None
    measure = None
    obstruction = structural_obstruction(net)
    if obstruction:
        labels = ", ".join(net.complex_label(y) for y in obstruction)
        evidence.append(Evidence("complex balance impossible", float(len(obstruction)), (0.0, 0.0), labels))
    else:
        box = None if window is None else box_window([window] * net.dimension)
        cert = certify_complex_balanced_nonexplosive(net, box, tol)
        if cert is not None:
            verdicts.append(Verdict.NON_EXPLOSIVE_CERTIFIED)
            verdicts.append(Verdict.STATIONARY_DISTRIBUTION_EXISTS)
            evidence.extend(cert.evidence())
            measure = cert.measure
        else:
            evidence.append(Evidence("complex balanced equilibrium", math.nan, (math.nan, math.nan), "none found"))

    rates = birth_death_rates(net)
    if rates is not None and lowest_closed_state(*rates) is not None:
        bd = classify_birth_death(*rates, window=200 if window is None else window, terms=terms, tol=tol)
        verdicts.extend(bd.verdicts)
        evidence.extend(bd.evidence)
        measure = measure or bd.measure
        cert = cert or bd.certificate
    note = SUPPORT_NOTE if cert else ""
    return ClassificationReport(tuple(verdicts), tuple(evidence), note=note, measure=measure, certificate=cert)
