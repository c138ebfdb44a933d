"""Ideal-gas closure, relaxation parameter choice, and equilibrium projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .mesh import (AdmissibilityError, ConservedField, Grid, RelaxationField,
                   check_admissible, internal_energy)


@dataclass(frozen=True)
class IdealGasEos:
    gamma: float = 1.4

    def __post_init__(self):
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")

    def pressure(self, rho, e):
        return pressure(rho, e, self.gamma)

    def sound_speed(self, rho, p):
        return sound_speed(rho, p, self.gamma)


def pressure(rho, e, gamma):
    """p = (gamma - 1) rho e, defined for positive density and energy."""
    rho = np.asarray(rho, dtype=float)
    e = np.asarray(e, dtype=float)
    if np.any(~(rho > 0)) or np.any(~(e > 0)):
        raise AdmissibilityError("pressure needs rho > 0 and e > 0")
    return (gamma - 1.0) * rho * e


def sound_speed(rho, p, gamma):
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(~(rho > 0)) or np.any(~(p > 0)):
        raise AdmissibilityError("sound speed needs rho > 0 and p > 0")
    return np.sqrt(gamma * p / rho)


# pressure-mode factor kept in [1 - FLOOR_MARGIN, 1]
FLOOR_MARGIN = 0.5


def select_relaxation_parameter(fld: ConservedField, grid: Grid, gamma, a_safety=1.05,
                                mach=1.0, cfl=None) -> float:
    """Global relaxation parameter ``a = a_safety * max(rho * c)`` over interior cells.

    ``c`` carries no Mach number, so ``a`` only depends on the density and
    specific internal energy of the field. For an ideal gas
    ``rho * sqrt(d p / d rho |_e) = rho * sqrt((gamma-1) e) < rho * c``,
    so the sub-characteristic condition holds with the margin ``a_safety``.

    With ``cfl`` given, ``a`` is raised to :func:`stability_floor` when that
    is larger.
    """
    check_admissible(fld, grid, mach)
    inner = grid.interior
    rho = fld.rho[inner]
    e = internal_energy(fld, mach)[inner]
    rho_c = rho * np.sqrt(gamma * (gamma - 1.0) * e)
    a = float(a_safety * np.max(rho_c))
    if cfl is not None and mach < 1:
        speed = np.abs(fld.mom[(slice(None),) + inner] / rho).max(axis=0)
        a = max(a, stability_floor(rho, rho_c, speed, cfl, mach))
    return a


def stability_floor(rho, rho_c, speed, cfl, mach, margin=FLOOR_MARGIN) -> float:
    """Smallest ``a`` that keeps ill-prepared pressure modes from growing.

    The explicit star velocity diffuses the fast pressure with weight
    ``(1 - M^2) / (2 a M^2)`` per face, while the implicit solve only damps it
    by ``(dt a / (M rho dx))^2``. For grid-scale modes the net pressure factor
    per stage is ``1 - (1 - M^2) rho^3 c^2 dx / (2 a^3 dt)``. With
    ``dt = cfl dx / max(|u| + a / rho)`` keeping that factor in [0, 1] needs
    ``2 cfl a^3 >= (1 - M^2) max(rho^3 c^2) max(|u| + a / rho)``; the left side
    grows faster in ``a``, so the root is unique.
    """
    k = (1.0 - mach**2) * float(np.max(rho * rho_c**2))
    speed = np.ravel(speed)
    tau = np.ravel(1.0 / rho)

    def excess(a):
        return 2.0 * cfl * margin * a**3 - k * float(np.max(speed + a * tau))

    if excess(1e-300) >= 0 or k == 0:
        return 0.0
    hi = 1.0
    while excess(hi) < 0:
        hi *= 2.0
    return float(brentq(excess, 0.0, hi, xtol=1e-14 * hi))


def step_floor(fld: ConservedField, grid: Grid, gamma, mach, dt,
               margin=FLOOR_MARGIN) -> float:
    """Smallest ``a`` keeping the pressure-mode factor of :func:`stability_floor`
    in range for a given stage step ``dt``; short steps need a larger ``a``."""
    if not mach < 1:
        return 0.0
    inner = grid.interior
    rho = fld.rho[inner]
    e = internal_energy(fld, mach)[inner]
    k = (1.0 - mach**2) * float(np.max(rho**3 * gamma * (gamma - 1.0) * e))
    return float((k * min(grid.spacing) / (2.0 * margin * dt)) ** (1.0 / 3.0))


def project_to_equilibrium(fld: ConservedField, mach, gamma,
                           relax: RelaxationField = None) -> RelaxationField:
    """Equilibrium relaxation variables: ``pi = psi = p(rho, e)`` in every cell.

    ``relax`` is accepted for interface symmetry and ignored: the projection
    overwrites both relaxation variables.
    """
    e = internal_energy(fld, mach)
    p = (gamma - 1.0) * fld.rho * e
    return RelaxationField(p.copy(), p.copy())
