import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from crnx.kinetics import MassActionField
from crnx.ode import OdeConfig, StiffnessError, ode_integrate
from crnx.parser import parse_network


def test_cubic_blow_up_time(cubic):
    res = ode_integrate(cubic, [1.0], 5.0)
    assert res.blow_up and res.threshold_reached
    assert abs(res.blow_up_time - math.log(2)) <= 1e-3
    lo, hi = res.blow_up_bracket
    assert lo <= math.log(2) <= hi
    assert res.growth_exponent == pytest.approx(2.0, rel=1e-3)


def test_path_matches_closed_form(cubic):
    res = ode_integrate(cubic, [1.0], 0.6)
    exact = np.exp(res.times) / (2 - np.exp(res.times))
    np.testing.assert_allclose(res.states[:, 0], exact, rtol=1e-8)
    assert not res.blow_up and res.final_time == 0.6


def test_switching_converges(switching):
    res = ode_integrate(switching, [2.0, 2.0, 2.0], 50.0)
    assert not res.blow_up
    assert np.max(np.abs(res.final_state - 1.0)) <= 1e-6


def test_agrees_with_scipy(switching):
    f = MassActionField(switching)
    ref = solve_ivp(f, (0, 10), [0.5, 3.0, 1.5], method="DOP853", rtol=1e-12, atol=1e-14)
    ours = ode_integrate(switching, [0.5, 3.0, 1.5], 10.0)
    np.testing.assert_allclose(ours.final_state, ref.y[:, -1], rtol=1e-8)


def test_zero_stays_zero():
    res = ode_integrate(parse_network("A -> 2A : 1\n2A -> 0 : 1"), [0.0], 10.0)
    assert np.all(res.states == 0.0)


def test_fast_singularity_below_threshold():
    # z' = z^3 from 1 blows up at 1/2 before the norm can reach 1e8 in double precision
    res = ode_integrate(lambda t, z: z**3, [1.0], 1.0)
    assert res.blow_up and not res.threshold_reached
    assert res.blow_up_time == pytest.approx(0.5, abs=1e-6)
    assert res.growth_exponent == pytest.approx(3.0, rel=1e-3)


def test_exponential_growth_is_not_blow_up():
    res = ode_integrate(parse_network("A -> 2A : 1"), [1.0], 30.0)
    assert not res.blow_up
    assert res.final_state[0] == pytest.approx(math.exp(30), rel=1e-7)


def test_stiffness_error():
    with pytest.raises(StiffnessError):
        ode_integrate(lambda t, z: -1e20 * (z - np.cos(t)), [0.0], 1.0)


def test_input_validation(cubic):
    with pytest.raises(ValueError):
        ode_integrate(cubic, [-1.0], 1.0)
    with pytest.raises(ValueError):
        ode_integrate(cubic, [1.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        ode_integrate(cubic, [1.0], 0.0)
    with pytest.raises(ValueError):
        OdeConfig(rtol=0.0)
