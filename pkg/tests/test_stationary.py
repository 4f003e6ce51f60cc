import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crnx.chains import Polynomial, birth_death_chain, birth_death_rates, integer_line_chain, integer_line_pi1
from crnx.model import CtmcSpec, as_ctmc
from crnx.series import SeriesVerdict
from crnx.stationary import (
    balance_residual,
    birth_death_stationary,
    box_window,
    embedded_measure,
    embedded_stationarity_residual,
    embedded_transition,
    expected_jump_rate,
    generator_expectation,
    interval_window,
    poisson_factorial_moment,
    product_form_poisson,
    table_measure,
    truncated_jump_rate,
)

P = Polynomial.parse


def test_product_poisson_mass():
    pi = product_form_poisson((2.0, 0.5))
    assert pi((3, 1)) == pytest.approx(math.exp(-2.5) * 2**3 / 6 * 0.5)
    assert pi((-1, 0)) == 0.0
    with pytest.raises(ValueError):
        product_form_poisson((1.0, 0.0))


def test_quartic_measure_matches_closed_form(quartic):
    b, d = birth_death_rates(quartic)
    pi = birth_death_stationary(b, d, lowest=1)
    for x in range(1, 101):
        assert pi(x) == pytest.approx(6 / (math.pi**2 * x**2), rel=1e-9)
    assert pi(0) == 0.0
    assert pi.relative_uncertainty < 1e-9


def test_cubic_measure_same_closed_form(cubic):
    b, d = birth_death_rates(cubic)
    pi = birth_death_stationary(b, d, lowest=1)
    assert pi(7) == pytest.approx(6 / (math.pi**2 * 49), rel=1e-9)


def test_non_normalizable_measure_flagged():
    # b = d gives a flat measure
    pi = birth_death_stationary(P("x"), P("x"), lowest=1, terms=1000)
    assert pi.normalizable is SeriesVerdict.DIVERGENT
    assert "not normalizable" in pi.description


def test_measure_beyond_window_extends_lazily():
    pi = birth_death_stationary(P("x^4"), P("x^2*(x-1)^2"), lowest=1, terms=1000)
    assert pi(5000) == pytest.approx(6 / (math.pi**2 * 5000**2), rel=1e-6)


def test_acr_balance_on_window(acr):
    spec = as_ctmc(acr)
    res = balance_residual(spec, product_form_poisson((1.0, 1.0)), box_window([30, 30]))
    assert res.passes(1e-8)
    # interior states are those whose in-neighbourhood is in the box
    assert (30, 30) in res.boundary and (5, 5) in res.interior


def test_balance_detects_wrong_measure(acr):
    spec = as_ctmc(acr)
    assert not balance_residual(spec, product_form_poisson((2.0, 1.0)), box_window([10, 10])).passes(1e-6)


def test_window_without_interior_raises():
    spec = integer_line_chain()
    with pytest.raises(ValueError):
        balance_residual(spec, integer_line_pi1, [(0,)])


def test_absorbing_state_is_balanced():
    spec = CtmcSpec(1, lambda x: [] if x == (0,) else [((x[0] - 1,), 1.0)], increments=((-1,),))
    pi = table_measure({(0,): 1.0})
    res = balance_residual(spec, pi, interval_window(0, 3))
    assert res.passes(0.0)
    assert expected_jump_rate(spec, pi).value == 0.0


@given(st.sampled_from([0.5, 1.0, 2.0]), st.integers(0, 4))
def test_poisson_factorial_moment_identity(c, k):
    assert poisson_factorial_moment(c, k, 80) == pytest.approx(c**k, rel=1e-12)


def test_acr_jump_rate_closed_form_and_brute_force(acr):
    spec = as_ctmc(acr)
    pi = product_form_poisson((1.0, 1.0))
    rate = expected_jump_rate(spec, pi)
    assert rate.finite and rate.value == pytest.approx(4.0, rel=1e-14)
    assert truncated_jump_rate(spec, pi, box_window([60, 60])) == pytest.approx(4.0, rel=1e-12)


def test_cubic_jump_rate_diverges(cubic):
    b, d = birth_death_rates(cubic)
    spec = birth_death_chain(b, d, 1)
    rate = expected_jump_rate(spec, birth_death_stationary(b, d, 1))
    assert rate.verdict is SeriesVerdict.DIVERGENT
    assert rate.lower > 1e3 and rate.upper == math.inf


def test_infinite_server_jump_rate():
    # Poisson(1): E[1 + x] = 2
    spec = birth_death_chain(P("1"), P("x"), 0)
    rate = expected_jump_rate(spec, birth_death_stationary(P("1"), P("x"), 0))
    assert rate.finite and rate.lower <= 2.0 <= rate.upper
    assert rate.value == pytest.approx(2.0, rel=1e-12)


def test_generator_expectation_vanishes(acr):
    spec = as_ctmc(acr)
    pi = product_form_poisson((1.0, 1.0))
    rng = np.random.default_rng(3)
    f = {(int(a), int(b)): float(v) for (a, b), v in zip(rng.integers(0, 8, (10, 2)), rng.normal(size=10))}
    value, scale = generator_expectation(spec, pi, f)
    assert abs(value) <= 1e-12 * scale


def test_embedded_chain(acr):
    spec = as_ctmc(acr)
    pi = product_form_poisson((1.0, 1.0))
    assert math.fsum(embedded_transition(spec, (2, 3), y) for y, _ in spec.neighbors((2, 3))) == pytest.approx(1.0)
    assert embedded_stationarity_residual(spec, pi, box_window([20, 20])).passes(1e-10)
    em = embedded_measure(spec, pi)
    assert em.normalizable is SeriesVerdict.FINITE
    assert em((1, 1)) == pytest.approx(pi((1, 1)) * spec.total_rate((1, 1)))
    with pytest.raises(ValueError):
        embedded_transition(CtmcSpec(1, lambda x: []), (0,), (1,))
