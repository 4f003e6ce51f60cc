import pytest
from hypothesis import given
from hypothesis import strategies as st

from crnx.model import Reaction, ReactionNetwork
from crnx.parser import CrnSyntaxError, format_network, parse_network, read_network


def test_parse_reversible_chain(quartic):
    assert quartic.species == ("A",)
    assert len(quartic.reactions) == 7
    ks = {(r.source, r.product): r.rate_constant for r in quartic.reactions}
    assert ks[((2,), (3,))] == 7 and ks[((3,), (2,))] == 4 and ks[((4,), (5,))] == 1


def test_coefficients_with_and_without_space():
    a = parse_network("A + B -> 3B : 1")
    b = parse_network("A + B -> 3 B : 1")
    assert a == b
    assert a.reactions[0].product == (0, 3)


def test_empty_complex_and_comments():
    net = parse_network("# comment\r\n0 -> A : 2.5  # trailing\r\n\r\nA -> 0 : 1e-1\n")
    assert net.reactions[0].source == (0,)
    assert net.reactions[1].rate_constant == pytest.approx(0.1)


def test_species_directive_fixes_order():
    net = parse_network("species B, A\nA -> B : 1\n")
    assert net.species == ("B", "A")
    assert net.reactions[0].source == (0, 1)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("A + -> B : 1", 1, 5),
        ("A -> B", 1, 7),
        ("A <-> B : 1", 1, 12),
        ("A -> A : 1", 1, 1),
        ("A -> B : 0", 1, 10),
        ("A -> B : 1\nA -> B : 2", 2, 1),
        ("0A -> B : 1", 1, 1),
    ],
)
def test_syntax_errors_are_located(text, line, column):
    with pytest.raises(CrnSyntaxError) as info:
        parse_network(text)
    assert info.value.line == line
    assert 1 <= info.value.column
    if column is not None:
        assert info.value.column <= max(column, len(text.splitlines()[line - 1]) + 1)


def test_read_network(tmp_path):
    p = tmp_path / "n.crn"
    p.write_text("0 <-> A : 1, 1\n")
    assert len(read_network(p).reactions) == 2


complexes = st.lists(st.integers(0, 3), min_size=2, max_size=2)


@given(st.lists(st.tuples(complexes, complexes, st.floats(0.01, 100)), min_size=1, max_size=6))
def test_format_round_trip(raw):
    seen, reactions = set(), []
    for s, p, k in raw:
        if s == p or (tuple(s), tuple(p)) in seen:
            continue
        seen.add((tuple(s), tuple(p)))
        reactions.append(Reaction(s, p, k))
    if not reactions:
        return
    net = ReactionNetwork(("X", "Y"), tuple(reactions))
    assert parse_network(format_network(net)) == net
