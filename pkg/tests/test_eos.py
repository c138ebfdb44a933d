import numpy as np
import pytest
from hypothesis import given, strategies as st

from relaximex import AdmissibilityError, Grid, IdealGasEos, field_from_primitive
from relaximex.eos import (project_to_equilibrium, select_relaxation_parameter, stability_floor,
                           step_floor)


def test_ideal_gas():
    eos = IdealGasEos(1.4)
    assert eos.pressure(2.0, 2.5) == pytest.approx(2.0)
    assert eos.sound_speed(1.0, 1.0) == pytest.approx(np.sqrt(1.4))
    with pytest.raises(AdmissibilityError):
        eos.pressure(1.0, -1.0)
    with pytest.raises(ValueError):
        IdealGasEos(1.0)


def test_projection_sets_both_pressures():
    g = Grid(6)
    p = np.linspace(0.5, 1.0, 6)
    fld = field_from_primitive(g, np.ones(6), np.ones(6), p, 0.01, 1.4)
    relax = project_to_equilibrium(fld, 0.01, 1.4)
    np.testing.assert_allclose(relax.pi[g.interior], p, rtol=1e-12)
    np.testing.assert_array_equal(relax.pi, relax.psi)


def _uniform(rho, p, u=0.0, mach=1.0, gamma=1.4, n=6):
    g = Grid(n)
    return g, field_from_primitive(g, np.full(n, rho), np.full(n, u), np.full(n, p), mach, gamma)


def test_relaxation_parameter_is_scaled_acoustic_impedance():
    g, fld = _uniform(2.0, 3.0)
    a = select_relaxation_parameter(fld, g, 1.4, a_safety=1.05)
    assert a == pytest.approx(1.05 * 2.0 * np.sqrt(1.4 * 3.0 / 2.0))


@given(st.floats(1e-4, 0.5), st.floats(0.5, 2.0))
def test_parameter_is_mach_independent_without_floor(mach, u):
    g, f1 = _uniform(1.0, 1.0, u, mach)
    g, f2 = _uniform(1.0, 1.0, u, 1.0)
    assert select_relaxation_parameter(f1, g, 1.4, mach=mach) == pytest.approx(
        select_relaxation_parameter(f2, g, 1.4, mach=1.0))


@given(st.floats(0.01, 0.2), st.floats(0.5, 2.0), st.floats(0.0, 2.0))
def test_stability_floor_solves_its_balance(cfl, rho, speed):
    rho_c = rho * np.sqrt(1.4)
    a = stability_floor(np.array([rho]), np.array([rho_c]), np.array([speed]), cfl, 0.01)
    k = (1 - 1e-4) * rho * rho_c**2
    assert 2 * cfl * 0.5 * a**3 == pytest.approx(k * (speed + a / rho), rel=1e-9)


def test_floors_vanish_at_unit_mach():
    g, fld = _uniform(1.0, 1.0)
    assert stability_floor(np.ones(1), np.ones(1), np.ones(1), 0.1, 1.0) == 0.0
    assert step_floor(fld, g, 1.4, 1.0, 1e-3) == 0.0
    assert select_relaxation_parameter(fld, g, 1.4, mach=1.0, cfl=0.1) == pytest.approx(
        select_relaxation_parameter(fld, g, 1.4, mach=1.0))


def test_step_floor_grows_for_short_steps():
    g, fld = _uniform(1.0, 1.0, mach=0.01)
    a1 = step_floor(fld, g, 1.4, 0.01, 1e-2)
    a2 = step_floor(fld, g, 1.4, 0.01, 1e-2 / 8)
    assert a2 == pytest.approx(2 * a1)
