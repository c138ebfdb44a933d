import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from relaximex import ReferenceScaling, init_gresho, init_mach_shock, init_smooth_gresho, init_sod
from relaximex import make_case
from relaximex.cases import (GRESHO_U_REF, gresho_pressure_offset, gresho_velocity,
                             smooth_gresho_pressure_offset, smooth_gresho_velocity)
from relaximex.diagnostics import kinetic_energy, primitive_arrays
from relaximex.mesh import centered_divergence


def test_sod_data_and_mass():
    case = init_sod()
    g = case.make_grid(200)
    s = case.nondimensional_state(g)
    x = g.centers(0)
    i, j = np.searchsorted(x, 0.25), np.searchsorted(x, 0.75)
    assert (s["rho"][i], s["p"][i]) == (1.0, 1.0)
    assert (s["rho"][j], s["p"][j]) == (0.125, 0.1)
    assert s["rho"].sum() * g.dx == pytest.approx(0.5625, rel=1e-14)
    assert case.t_end == 0.1644 and case.mach == 1.0 and case.boundary == ("zero_gradient",)


def test_mach_shock_scaling():
    case = init_mach_shock(6.2e-3)
    s = case.nondimensional_state(case.make_grid(50))
    assert s["u1"][-1] == pytest.approx(1.2903, abs=1e-4)
    assert s["p"][0] - s["p"][-1] == pytest.approx(0.001, abs=1e-15)
    assert case.t_end == pytest.approx(0.25 / 6.2e-3)
    unit = init_mach_shock(1.0).nondimensional_state(case.make_grid(50))
    assert unit["u1"][-1] == pytest.approx(0.008)
    with pytest.raises(ValueError):
        init_mach_shock(0.0)


@given(st.floats(1e-4, 1.0), st.floats(0.1, 10), st.floats(0.1, 10))
def test_reference_relations_and_round_trip(mach, rho_r, u_r):
    sc = ReferenceScaling.from_mach(2.0, rho_r, u_r, mach)
    assert sc.c_r == pytest.approx(u_r / mach)
    assert sc.p_r == pytest.approx(rho_r * sc.c_r**2)
    assert sc.mach == pytest.approx(mach)
    vals = {"rho": np.array([1.3]), "u": np.array([-0.4]), "p": np.array([7.0]), "x": np.array([0.2])}
    back = sc.to_dimensional(sc.to_nondimensional(vals))
    for k in vals:
        np.testing.assert_allclose(back[k], vals[k], rtol=1e-14)


def test_vortex_round_trip_to_dimensional():
    case = init_gresho(1e-2)
    g = case.make_grid(16)
    dim = case.dimensional_state(g)
    back = case.scaling.to_dimensional(case.nondimensional_state(g))
    for k in dim:
        np.testing.assert_allclose(back[k], dim[k], rtol=1e-14)


def test_gresho_profile_values():
    assert gresho_velocity(0.2) == pytest.approx(1.0)
    assert gresho_velocity(0.5) == 0.0
    assert gresho_pressure_offset(0.5) == pytest.approx(-2.0 + 4.0 * np.log(2.0))
    assert smooth_gresho_velocity(0.2) == pytest.approx(1.0)
    assert smooth_gresho_velocity(0.4 - 1e-15) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("offset", [gresho_pressure_offset, smooth_gresho_pressure_offset])
def test_pressure_is_continuous_at_junctions(offset):
    for r in (0.2, 0.4):
        assert abs(offset(r - 1e-13) - offset(r + 1e-13)) <= 1e-10


@pytest.mark.parametrize("velocity,offset", [(gresho_velocity, gresho_pressure_offset),
                                             (smooth_gresho_velocity, smooth_gresho_pressure_offset)])
def test_centrifugal_balance(velocity, offset):
    h = 1e-5
    r = np.linspace(1e-3, 0.49, 1000)
    r = r[(np.abs(r - 0.2) > 2 * h) & (np.abs(r - 0.4) > 2 * h)]
    dp = (offset(r + h) - offset(r - h)) / (2 * h)
    np.testing.assert_allclose(dp, velocity(r) ** 2 / r, atol=1e-5)


def test_vortex_background_pressure_and_mach():
    case = init_gresho(1e-2, scaling="sound_speed")
    assert case.params["p0"] == pytest.approx(1.0 / (5.0 / 3.0 * 1e-4))
    assert case.mach == 1e-2
    reduced = init_gresho(1e-2)
    assert reduced.mach == pytest.approx(np.sqrt(5.0 / 3.0) * 1e-2)
    g = reduced.make_grid(40)
    p = primitive_arrays(reduced.initial_field(g), g, reduced.mach, reduced.gamma)["p"]
    assert p.max() == pytest.approx(1.0 / GRESHO_U_REF**2, rel=1e-3)
    with pytest.raises(ValueError):
        init_gresho(0.0)
    with pytest.raises(ValueError):
        init_gresho(0.1, scaling="other")


def test_initial_kinetic_energy_matches_quadrature():
    case = init_gresho(1e-2)
    g = case.make_grid(40)
    exact, _ = quad(lambda r: 0.5 * gresho_velocity(r) ** 2 * 2 * np.pi * r, 0, 0.4,
                    points=[0.2])
    ke = kinetic_energy(case.initial_field(g), g) * GRESHO_U_REF**2
    assert ke == pytest.approx(exact, rel=1e-2)


@pytest.mark.parametrize("init,rate", [(init_smooth_gresho, 1.8), (init_gresho, 0.9)])
def test_vortex_mean_divergence_decays(init, rate):
    """Mean |div u| of midpoint data: second order for the smooth profile, first
    order for the kinked classical profile."""
    case = init(1e-2)
    d = []
    for n in (40, 80):
        g = case.make_grid(n)
        fld = case.initial_field(g)
        d.append(np.abs(centered_divergence(fld.mom / fld.rho, g)).mean())
    assert np.log2(d[0] / d[1]) > rate


def test_make_case_dispatch():
    assert make_case("sod").name == "sod"
    assert make_case("mach_shock", mach=1e-2).mach == 1e-2
    assert make_case("smooth_gresho", mach=0.1, scaling="sound_speed").mach == 0.1
    with pytest.raises(ValueError):
        make_case("custom")
    with pytest.raises(ValueError):
        make_case("unknown")
