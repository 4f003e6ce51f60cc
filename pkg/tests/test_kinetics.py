import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from crnx.kinetics import (
    MassActionField,
    apply_generator,
    deterministic_rate,
    ode_rhs,
    stochastic_intensity,
    total_intensity,
)
from crnx.model import as_ctmc


def test_stochastic_intensity_falling_factorial(quartic):
    # 4A -> 5A: x (x-1) (x-2) (x-3)
    k = next(i for i, r in enumerate(quartic.reactions) if r.source == (4,))
    assert stochastic_intensity(quartic, k, (6,)) == 360
    assert stochastic_intensity(quartic, k, (3,)) == 0


def test_total_birth_rate_is_quartic(quartic):
    births = [i for i, r in enumerate(quartic.reactions) if r.vector == (1,)]
    for x in range(0, 50):
        assert math.fsum(quartic.intensity(k, (x,)) for k in births) == x**4


def test_deterministic_zero_power_convention(acr):
    # 0 -> A has the empty source complex: rate kappa at any z, including z = 0
    assert deterministic_rate(acr, 0, (0.0, 0.0)) == 1.0
    assert MassActionField(acr).rates([0.0, 0.0])[0] == 1.0


def _symbolic_rhs(net):
    zs = sympy.symbols(f"z0:{net.dimension}")
    rhs = [0] * net.dimension
    for r in net.reactions:
        mono = sympy.Integer(1)
        for z, y in zip(zs, r.source):
            mono *= z**y
        for i, v in enumerate(r.vector):
            rhs[i] += v * sympy.nsimplify(r.rate_constant) * mono
    return zs, rhs


@given(st.lists(st.floats(0, 5), min_size=3, max_size=3))
def test_ode_rhs_matches_symbolic(switching, z):
    zs, rhs = _symbolic_rhs(switching)
    expected = [float(e.subs(dict(zip(zs, z)))) for e in rhs]
    np.testing.assert_allclose(ode_rhs(switching, z), expected, rtol=1e-12, atol=1e-12)


def test_cubic_network_scalar_field(cubic):
    # z' = z + z^2
    for z in (0.0, 0.5, 3.0):
        assert ode_rhs(cubic, [z])[0] == pytest.approx(z + z * z)


def test_apply_generator_indicator(immigration):
    spec = as_ctmc(immigration)
    f = {(2,): 1.0}
    # (A 1_{2})(x) = sum_y q(x,y)(f(y) - f(x))
    assert apply_generator(spec, f, (1,)) == 1.0
    assert apply_generator(spec, f, (2,)) == -(1.0 + 2.0)
    assert apply_generator(spec, f, (3,)) == 3.0
    assert apply_generator(spec, f, (7,)) == 0.0
    assert total_intensity(immigration, (2,)) == 3.0
