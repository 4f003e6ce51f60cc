"""Reaction-graph structure and complex balanced equilibria."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np

from .model import Complex, ReactionNetwork


def _reaction_graph(net: ReactionNetwork) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(net.complexes)
    g.add_edges_from((r.source, r.product) for r in net.reactions)
    return g


def linkage_classes(net: ReactionNetwork) -> list[list[Complex]]:
    """Connected components of the undirected reaction graph.

    Classes and their members keep the order in which complexes first
    appear in the network.
    """
    order = {y: i for i, y in enumerate(net.complexes)}
    comps = [sorted(c, key=order.__getitem__) for c in nx.weakly_connected_components(_reaction_graph(net))]
    return sorted(comps, key=lambda c: order[c[0]])


def is_weakly_reversible(net: ReactionNetwork) -> bool:
    g = _reaction_graph(net)
    scc = {}
    for i, comp in enumerate(nx.strongly_connected_components(g)):
        for y in comp:
            scc[y] = i
    return all(scc[r.source] == scc[r.product] for r in net.reactions)


def stoichiometric_rank(net: ReactionNetwork) -> int:
    """Exact rank of the span of the reaction vectors."""
    import sympy

    return int(sympy.Matrix(net.reaction_vectors).rank())


def deficiency(net: ReactionNetwork) -> int:
    return len(net.complexes) - len(linkage_classes(net)) - stoichiometric_rank(net)


@dataclass(frozen=True)
class StructureReport:
    complex_count: int
    linkage_class_count: int
    stoichiometric_dimension: int
    deficiency: int
    weakly_reversible: bool
    linkage_classes: tuple[tuple[Complex, ...], ...]

    def __post_init__(self):
        if self.deficiency != self.complex_count - self.linkage_class_count - self.stoichiometric_dimension:
            raise ValueError("deficiency does not match n - l - s")
        if self.deficiency < 0:
            raise ValueError("negative deficiency")


def structure_report(net: ReactionNetwork) -> StructureReport:
    classes = linkage_classes(net)
    s = stoichiometric_rank(net)
    n = len(net.complexes)
    return StructureReport(
        complex_count=n,
        linkage_class_count=len(classes),
        stoichiometric_dimension=s,
        deficiency=n - len(classes) - s,
        weakly_reversible=is_weakly_reversible(net),
        linkage_classes=tuple(tuple(c) for c in classes),
    )


@dataclass(frozen=True)
class ComplexBalanceCheck:
    balanced: bool
    # complex -> (outflow, inflow, |outflow - inflow|, allowed)
    residuals: dict

    @property
    def max_relative(self) -> float:
        return max(res / max(out + inn, 1.0) for out, inn, res, _ in self.residuals.values())

    @property
    def max_residual(self) -> float:
        return max(res for _, _, res, _ in self.residuals.values())


def check_complex_balanced(net: ReactionNetwork, c, tol: float = 1e-10) -> ComplexBalanceCheck:
    """Compare flux out of and into each complex at concentrations ``c``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (net.dimension,) or np.any(c <= 0):
        raise ValueError("c must be a positive vector with one entry per species")
    out = {y: [] for y in net.complexes}
    inn = {y: [] for y in net.complexes}
    for r in net.reactions:
        flux = r.rate_constant * float(np.prod(c ** np.array(r.source, dtype=float)))
        out[r.source].append(flux)
        inn[r.product].append(flux)
    residuals = {}
    ok = True
    for y in net.complexes:
        o, i = math.fsum(out[y]), math.fsum(inn[y])
        res = abs(o - i)
        allowed = tol * max(o + i, 1.0)
        ok = ok and res <= allowed
        residuals[y] = (o, i, res, allowed)
    return ComplexBalanceCheck(ok, residuals)


def structural_obstruction(net: ReactionNetwork) -> list[Complex]:
    """Complexes that only ever appear as a source or only as a product.

    Any such complex makes complex balance impossible at positive
    concentrations, whatever the rate constants.
    """
    sources = {r.source for r in net.reactions}
    products = {r.product for r in net.reactions}
    return [y for y in net.complexes if (y in sources) != (y in products)]


def _balance_system(net: ReactionNetwork):
    cidx = {y: i for i, y in enumerate(net.complexes)}
    n, m = len(cidx), len(net.reactions)
    incidence = np.zeros((n, m))
    for k, r in enumerate(net.reactions):
        incidence[cidx[r.source], k] += 1.0
        incidence[cidx[r.product], k] -= 1.0
    sources = np.array([r.source for r in net.reactions], dtype=float)
    log_kappa = np.log([r.rate_constant for r in net.reactions])
    return incidence, sources, log_kappa


def find_complex_balanced_equilibrium(
    net: ReactionNetwork,
    attempts: int = 20,
    tol: float = 1e-10,
    seed: int = 0,
    max_iter: int = 100,
) -> Optional[np.ndarray]:
    """Search for a positive complex balanced equilibrium.

    Damped Gauss-Newton on the per-complex balance residuals in
    log-concentration coordinates, restarted from ``attempts`` random
    points drawn uniformly from [-2, 2]^d (start ``i`` uses stream ``i``
    of ``seed``). Returns ``None`` when no start converges or a
    structural obstruction rules equilibria out.
    """
    if attempts < 1:
        raise ValueError("attempts must be >= 1")
    if structural_obstruction(net):
        return None
    incidence, sources, log_kappa = _balance_system(net)
    d = net.dimension
    for i in range(attempts):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        u = rng.uniform(-2.0, 2.0, size=d)
        c = _newton(u, incidence, sources, log_kappa, max_iter, tol)
        if c is not None and check_complex_balanced(net, c, tol).balanced:
            return c
    return None


def _logsumexp_rows(mask, logf):
    z = np.where(mask, logf[None, :], -np.inf)
    shift = np.max(z, axis=1)
    w = np.exp(z - shift[:, None])
    total = w.sum(axis=1)
    return shift + np.log(total), w / total[:, None]


def _newton(u, incidence, sources, log_kappa, max_iter, rel_tol=1e-10):
    # residual per complex: log(outflow) - log(inflow); zero iff balanced
    out_mask = incidence > 0
    in_mask = incidence < 0

    def residual(u):
        logf = log_kappa + sources @ u
        lo, wo = _logsumexp_rows(out_mask, logf)
        li, wi = _logsumexp_rows(in_mask, logf)
        return lo - li, (wo - wi) @ sources

    r, jac = residual(u)
    err = np.linalg.norm(r)
    for _ in range(max_iter):
        if np.max(np.abs(r)) < 1e-14:
            break
        accepted = None
        for mu in (0.0, 1e-4, 1e-2, 1.0, 1e2):
            if mu == 0.0:
                step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            else:
                step = np.linalg.solve(jac.T @ jac + mu * np.eye(len(u)), -jac.T @ r)
            lam = 1.0
            while lam > 1e-6:
                u_new = u + lam * step
                r_new, jac_new = residual(u_new)
                if np.linalg.norm(r_new) < err:
                    accepted = (u_new, r_new, jac_new)
                    break
                lam *= 0.5
            if accepted is not None:
                break
        if accepted is None:
            break
        u, r, jac = accepted
        err = np.linalg.norm(r)
    # |log(out/in)| <= tol implies |out - in| <= tol * (out + in) to first order
    if not np.all(np.abs(u) < 700) or np.max(np.abs(r)) > rel_tol:
        return None
    return np.exp(u)
