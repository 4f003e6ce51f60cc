import itertools

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from crnx.model import Reaction, ReactionNetwork
from crnx.parser import parse_network
from crnx.structure import (
    StructureReport,
    check_complex_balanced,
    deficiency,
    find_complex_balanced_equilibrium,
    is_weakly_reversible,
    linkage_classes,
    stoichiometric_rank,
    structural_obstruction,
    structure_report,
)


def test_acr_structure(acr):
    rep = structure_report(acr)
    assert rep.weakly_reversible
    assert (rep.complex_count, rep.linkage_class_count, rep.stoichiometric_dimension, rep.deficiency) == (4, 2, 2, 0)


def test_quartic_structure(quartic):
    rep = structure_report(quartic)
    assert not rep.weakly_reversible
    assert rep.deficiency == 3
    assert structural_obstruction(quartic) == [(5,)]


def test_linkage_class_order(switching):
    labels = [[switching.complex_label(y) for y in c] for c in linkage_classes(switching)]
    assert labels == [["0", "A", "B"], ["2C", "3C"], ["A + 3C", "A + 2C"]]


def test_structure_report_invariants():
    with pytest.raises(ValueError):
        StructureReport(3, 1, 1, 0, True, ())


# -- independent oracles -------------------------------------------------------


def _reachable(edges, nodes):
    reach = {u: {u} for u in nodes}
    changed = True
    while changed:
        changed = False
        for u, v in edges:
            for w in nodes:
                if u in reach[w] and not reach[w] >= reach[v]:
                    reach[w] |= reach[v]
                    changed = True
    return reach


def _weakly_reversible_oracle(net):
    edges = [(r.source, r.product) for r in net.reactions]
    reach = _reachable(edges, net.complexes)
    return all(u in reach[v] for u, v in edges)


def _linkage_count_oracle(net):
    undirected = [(r.source, r.product) for r in net.reactions] + [(r.product, r.source) for r in net.reactions]
    reach = _reachable(undirected, net.complexes)
    return len({frozenset(v) for v in reach.values()})


complex_st = st.tuples(st.integers(0, 2), st.integers(0, 2))


@st.composite
def networks(draw):
    pairs = draw(st.lists(st.tuples(complex_st, complex_st), min_size=1, max_size=7, unique=True))
    reactions = [Reaction(s, p, draw(st.floats(0.2, 5))) for s, p in pairs if s != p]
    assume(reactions)
    return ReactionNetwork(("A", "B"), tuple(reactions))


@given(networks())
def test_structure_against_oracles(net):
    assert is_weakly_reversible(net) == _weakly_reversible_oracle(net)
    assert len(linkage_classes(net)) == _linkage_count_oracle(net)
    assert stoichiometric_rank(net) == np.linalg.matrix_rank(np.array(net.reaction_vectors, dtype=float))
    assert deficiency(net) >= 0


# -- complex balance -----------------------------------------------------------


def test_acr_equilibrium(acr):
    c = find_complex_balanced_equilibrium(acr)
    np.testing.assert_allclose(c, [1.0, 1.0], rtol=1e-12)
    chk = check_complex_balanced(acr, [1.0, 1.0])
    assert chk.balanced and chk.max_residual <= 1e-12


def test_immigration_death_equilibrium():
    # kappa_1 = kappa_2 c
    c = find_complex_balanced_equilibrium(parse_network("0 <-> A : 3, 1"))
    assert c[0] == pytest.approx(3.0, rel=1e-12)


def test_obstruction_short_circuits(quartic):
    assert find_complex_balanced_equilibrium(quartic) is None


def test_not_balanced_away_from_equilibrium(acr):
    assert not check_complex_balanced(acr, [2.0, 1.0]).balanced
    with pytest.raises(ValueError):
        check_complex_balanced(acr, [0.0, 1.0])


@st.composite
def reversible_cycles(draw):
    """Weakly reversible deficiency-zero networks: disjoint reversible pairs and 3-cycles."""
    pool = [c for c in itertools.product(range(3), repeat=2)]
    chosen = draw(st.permutations(pool))
    reactions, i = [], 0
    for size in draw(st.lists(st.sampled_from([2, 3]), min_size=1, max_size=2)):
        group = chosen[i:i + size]
        i += size
        for a, b in zip(group, group[1:] + group[:1]):
            if size == 2 and a == group[1]:
                continue
            reactions.append(Reaction(a, b, draw(st.floats(0.25, 4))))
            if size == 2:
                reactions.append(Reaction(b, a, draw(st.floats(0.25, 4))))
    return ReactionNetwork(("A", "B"), tuple(reactions))


@given(reversible_cycles())
def test_deficiency_zero_weakly_reversible_is_balanced(net):
    # any rate constants give a complex balanced equilibrium in this class
    assume(deficiency(net) == 0 and is_weakly_reversible(net))
    c = find_complex_balanced_equilibrium(net)
    assert c is not None
    assert check_complex_balanced(net, c, tol=1e-9).balanced
