import numpy as np
import pytest

from relaximex import Grid, LinearSolverError, RelaxationField, assemble, field_from_primitive
from relaximex import implicit_step, solve
from relaximex.eos import project_to_equilibrium


def dense_reference(rho, u, psi, grid, mach, a, dt):
    """Loop-built matrix and right-hand side for periodic or zero-gradient sides."""
    shape = grid.shape
    n = int(np.prod(shape))
    A = np.eye(n)
    b = np.zeros(n)
    idx = np.arange(n).reshape(shape)
    for cell in np.ndindex(*shape):
        i = idx[cell]
        tau = 1.0 / rho[cell]
        div = 0.0
        for axis in range(grid.dim):
            h = grid.spacing[axis]
            beta = (dt * a / (mach * h)) ** 2
            nbr = {}
            for step in (-1, 1):
                c = list(cell)
                c[axis] += step
                if 0 <= c[axis] < shape[axis]:
                    nbr[step] = tuple(c)
                elif grid.boundary[axis] == "periodic":
                    c[axis] %= shape[axis]
                    nbr[step] = tuple(c)
                else:
                    nbr[step] = None
            ghost_u = {s: (u[axis][nbr[s]] if nbr[s] else u[axis][cell]) for s in (-1, 1)}
            div += (ghost_u[1] - ghost_u[-1]) / (2 * h)
            for step, c in nbr.items():
                if c is None:
                    continue
                coef = beta * tau * 0.5 * (tau + 1.0 / rho[c])
                A[i, i] += coef
                A[i, idx[c]] -= coef
        b[i] = psi[cell] - dt * a**2 * tau * div
    return A, b


@pytest.mark.parametrize("nx,ny,bc", [(9, 0, ("periodic",)), (9, 0, ("zero_gradient",)),
                                       (5, 4, ("periodic", "zero_gradient"))])
def test_matrix_matches_dense_reference(rng, nx, ny, bc):
    g = Grid(nx, ny, boundary=bc)
    rho = rng.uniform(0.5, 2.0, g.shape)
    u = rng.uniform(-1, 1, (g.dim,) + g.shape)
    p = rng.uniform(0.5, 2.0, g.shape)
    mach, a, dt = 0.05, 2.3, 0.01
    fld = field_from_primitive(g, rho, u, p, mach, 1.4)
    relax = project_to_equilibrium(fld, mach, 1.4)
    system = assemble(fld, relax, g, mach, a, dt)
    A, b = dense_reference(rho, u, p, g, mach, a, dt)
    np.testing.assert_allclose(system.matrix.toarray(), A, rtol=1e-13, atol=1e-13)
    np.testing.assert_allclose(system.rhs, b, rtol=1e-13, atol=1e-13)
    psi, info = solve(system, tol=1e-12)
    np.testing.assert_allclose(psi.ravel(), np.linalg.solve(A, b), rtol=1e-10)


@pytest.mark.parametrize("mach", [1e-1, 1e-3])
def test_fourier_mode_is_damped_exactly(mach):
    """For rho = 1, u = 0 a periodic sine is an eigenvector of the operator."""
    n = 32
    g = Grid(n)
    x = g.centers(0)
    psi0 = 1.0 + 1e-3 * np.sin(2 * np.pi * x)
    fld = field_from_primitive(g, np.ones(n), np.zeros(n), psi0, mach, 1.4)
    relax = project_to_equilibrium(fld, mach, 1.4)
    a, dt = 1.5, 0.01
    new, _ = implicit_step(fld, relax, g, mach, a, dt)
    beta = (dt * a / (mach * g.dx)) ** 2
    factor = 1.0 / (1.0 + beta * (2 - 2 * np.cos(2 * np.pi * g.dx)))
    # rounding grows with the condition number, about 4 beta
    np.testing.assert_allclose(new.psi[g.interior], 1.0 + factor * 1e-3 * np.sin(2 * np.pi * x),
                               rtol=0, atol=1e-15 * (1 + 4 * beta))
    np.testing.assert_array_equal(new.pi, relax.pi)


def test_two_dimensional_mode_with_both_preconditioners():
    g = Grid(16, 16)
    x, y = g.mesh()
    mach = 1e-2
    psi0 = 1.0 + 1e-4 * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)
    fld = field_from_primitive(g, np.ones(g.shape), np.zeros((2,) + g.shape), psi0, mach, 1.4)
    relax = project_to_equilibrium(fld, mach, 1.4)
    a, dt = 1.5, 0.005
    beta = (dt * a / (mach * g.dx)) ** 2
    factor = 1.0 / (1.0 + 2 * beta * (2 - 2 * np.cos(2 * np.pi * g.dx)))
    expect = 1.0 + factor * 1e-4 * np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)
    for pre in ("ilu", "jacobi"):
        new, info = implicit_step(fld, relax, g, mach, a, dt, preconditioner=pre)
        np.testing.assert_allclose(new.psi[g.interior], expect, rtol=1e-10)
        assert info.method == f"gmres+{pre}" and info.residual <= 1e-10


def test_constant_pressure_at_rest_is_a_fixed_point():
    g = Grid(8, 6, boundary=("zero_gradient", "zero_gradient"))
    fld = field_from_primitive(g, np.ones(g.shape), np.zeros((2,) + g.shape),
                               np.full(g.shape, 0.7), 1e-3, 1.4)
    relax = project_to_equilibrium(fld, 1e-3, 1.4)
    new, _ = implicit_step(fld, relax, g, 1e-3, 2.0, 0.01)
    np.testing.assert_allclose(new.psi, 0.7, rtol=1e-10)


def test_dirichlet_closure_pulls_toward_boundary_value():
    g = Grid(10, boundary=("zero_gradient",))
    fld = field_from_primitive(g, np.ones(10), np.zeros(10), np.ones(10), 0.1, 1.4)
    relax = project_to_equilibrium(fld, 0.1, 1.4)
    new, _ = implicit_step(fld, relax, g, 0.1, 1.0, 0.05, closure="dirichlet", dirichlet_value=2.0)
    psi = new.psi[g.interior]
    assert np.all(psi > 1.0) and psi[0] > psi[5]
    with pytest.raises(ValueError, match="dirichlet_value"):
        assemble(fld, relax, g, 0.1, 1.0, 0.05, closure="dirichlet")


def test_unreachable_tolerance_raises():
    g = Grid(24, 24)
    rng = np.random.default_rng(3)
    fld = field_from_primitive(g, rng.uniform(0.5, 2, g.shape), np.zeros((2,) + g.shape),
                               rng.uniform(0.5, 2, g.shape), 1e-3, 1.4)
    system = assemble(fld, project_to_equilibrium(fld, 1e-3, 1.4), g, 1e-3, 2.0, 0.01)
    with pytest.raises(LinearSolverError) as info:
        solve(system, tol=1e-15, max_iter=1, preconditioner="jacobi", restart=2)
    assert info.value.residual > 1e-15


def test_psi_ghosts_follow_boundary_kind():
    g = Grid(6, boundary=("periodic",))
    fld = field_from_primitive(g, np.ones(6), np.linspace(0, 1, 6), np.ones(6), 0.1, 1.4)
    relax = RelaxationField(np.ones(10), np.ones(10))
    new, _ = implicit_step(fld, relax, g, 0.1, 1.0, 0.01)
    np.testing.assert_array_equal(new.psi[:2], new.psi[6:8])


@pytest.mark.parametrize("dim", [1, 2])
def test_maximum_principle_at_rest(dim):
    rng = np.random.default_rng(11 + dim)
    for _ in range(20):
        g = Grid(12) if dim == 1 else Grid(8, 7, boundary=("zero_gradient", "periodic"))
        p = rng.uniform(0.3, 3.0, g.shape)
        mach = 10 ** rng.uniform(-3, 0)
        fld = field_from_primitive(g, rng.uniform(0.3, 3.0, g.shape), np.zeros((dim,) + g.shape),
                                   p, mach, 1.4)
        new, _ = implicit_step(fld, project_to_equilibrium(fld, mach, 1.4), g, mach,
                               rng.uniform(0.5, 5), rng.uniform(1e-4, 1e-2), tol=1e-13)
        psi = new.psi[g.interior]
        span = p.max() - p.min()
        assert psi.min() >= p.min() - 1e-9 * span and psi.max() <= p.max() + 1e-9 * span


def test_manufactured_solution_converges_at_second_order():
    mach, a, dt = 0.1, 1.0, 0.01
    beta_c = (dt * a / mach) ** 2
    k = 2 * np.pi

    def tau(x):
        return 1.0 / (1.0 + 0.2 * np.sin(k * x))

    def forcing(x):
        t = tau(x)
        dt_dx = -0.2 * k * np.cos(k * x) * t**2
        dpsi, d2psi = -k * np.sin(k * x), -k * k * np.cos(k * x)
        return np.cos(k * x) - beta_c * t * (dt_dx * dpsi + t * d2psi)

    errors = []
    levels = [16, 32, 64, 128]
    for n in levels:
        g = Grid(n)
        x = g.centers(0)
        fld = field_from_primitive(g, 1.0 / tau(x), np.zeros(n), np.ones(n), mach, 1.4)
        psi = np.zeros(n + 4)
        psi[g.interior] = forcing(x)
        new, _ = implicit_step(fld, RelaxationField(psi.copy(), psi), g, mach, a, dt)
        errors.append(np.abs(new.psi[g.interior] - np.cos(k * x)).max())
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all((rates >= 1.8) & (rates <= 2.2)), rates
