import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from relaximex import Grid, field_from_primitive

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def centered_curl(phi, grid):
    """Velocity (d_y phi, -d_x phi) with periodic centered differences.

    Centered differences commute, so its centered divergence vanishes to rounding.
    """
    def d(axis, h):
        return (np.roll(phi, -1, axis) - np.roll(phi, 1, axis)) / (2.0 * h)
    return np.stack([d(1, grid.dy), -d(0, grid.dx)])


def random_well_prepared(rng, dim=None, mach=None, gamma=None, n=None):
    """Admissible periodic field with rho = O(M), p = O(M^2) fluctuations and a
    discretely divergence-free velocity plus O(M) noise."""
    dim = int(rng.integers(1, 3)) if dim is None else dim
    mach = 10 ** rng.uniform(-3, -0.3) if mach is None else mach
    gamma = float(rng.choice([1.4, 5.0 / 3.0])) if gamma is None else gamma
    n = int(rng.integers(6, 12)) if n is None else n
    grid = Grid(n, 0) if dim == 1 else Grid(n, n)
    rho0, p0 = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
    rho = rho0 * (1 + mach * rng.uniform(-1, 1, grid.shape))
    p = p0 * (1 + mach**2 * rng.uniform(-1, 1, grid.shape))
    if dim == 1:
        u = (rng.uniform(-1, 1) + mach * rng.uniform(-1, 1, grid.shape))[np.newaxis]
    else:
        phi = rng.uniform(-1, 1, grid.shape) * grid.dx
        u = centered_curl(phi, grid) + mach * rng.uniform(-1, 1, (2,) + grid.shape)
    return grid, field_from_primitive(grid, rho, u, p, mach, gamma), mach, gamma


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Callable that stores one verdict line for the terminal summary."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])
    return lines.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
