import numpy as np
import pytest

from relaximex import (DiagnosticsRecord, Grid, convergence_rate, convergence_rates,
                       field_from_primitive, kinetic_energy, l1_error)
from relaximex.diagnostics import fitted_exponent, primitive_arrays


def test_table_rates():
    assert convergence_rate(20, 4.0, 40, 1.0) == pytest.approx(2.0)
    assert convergence_rate(20, 1.810e-3, 40, 3.705e-4) == pytest.approx(2.288, abs=1e-3)
    # hand evaluation: ln(5.070/1.396) / ln 2
    assert convergence_rate(40, 5.070e-3, 80, 1.396e-3) == pytest.approx(1.86069, abs=1e-3)
    assert np.isnan(convergence_rate(20, 0.0, 40, 1.0))
    assert len(convergence_rates([20, 40, 60], [1.0, 0.25, 0.1])) == 2


def test_l1_error_definition():
    g = Grid(10, 10)
    base = field_from_primitive(g, np.ones(g.shape), np.zeros((2,) + g.shape), np.ones(g.shape), 0.1, 1.4)
    err = l1_error(base, base, g, 0.1, 1.4)
    assert all(v == 0.0 for v in err.values()) and set(err) == {"rho", "u1", "u2", "p"}
    shifted = field_from_primitive(g, np.full(g.shape, 1.25), np.zeros((2,) + g.shape),
                                   np.ones(g.shape), 0.1, 1.4)
    assert l1_error(shifted, base, g, 0.1, 1.4)["rho"] == pytest.approx(0.25)
    ref = primitive_arrays(base, g, 0.1, 1.4)
    assert l1_error(shifted, ref, g, 0.1, 1.4)["rho"] == pytest.approx(0.25)


def test_kinetic_energy_values():
    g = Grid(8, 8)
    still = field_from_primitive(g, np.ones(g.shape), np.zeros((2,) + g.shape), np.ones(g.shape), 0.1, 1.4)
    assert kinetic_energy(still, g) == 0.0
    moving = field_from_primitive(g, np.ones(g.shape), np.stack([np.full(g.shape, 0.6),
                                  np.full(g.shape, 0.8)]), np.ones(g.shape), 0.1, 1.4)
    assert kinetic_energy(moving, g) == pytest.approx(0.5)


def test_record_starts_at_unit_ratio():
    g = Grid(8, 8)
    x, y = g.mesh()
    fld = field_from_primitive(g, np.ones(g.shape), np.stack([np.sin(2 * np.pi * y), 0 * x]),
                               np.ones(g.shape), 0.1, 1.4)
    rec = DiagnosticsRecord(g, 0.1, 1.4)
    rec.record(0.0, fld)
    assert rec.kinetic_curve()[0] == 1.0 and rec.kinetic_ratio() == 1.0
    row = next(rec.as_rows())
    assert set(row) == {"t", "mass", "energy", "kinetic", "max_div", "p_fluct"}


def test_fitted_exponent_recovers_power_law():
    xs = [1e-1, 1e-2, 1e-3]
    assert fitted_exponent(xs, [3 * x**2 for x in xs]) == pytest.approx(2.0)
