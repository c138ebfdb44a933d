"""Benchmark initial data, reference scalings and case descriptions.

Every case is defined by dimensional data plus a reference scaling; the
solver only ever sees the non-dimensional fields. Cells are initialised by
midpoint evaluation of the analytic profiles.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .mesh import ConservedField, Grid, field_from_primitive

CASE_NAMES = ("sod", "mach_shock", "gresho", "smooth_gresho", "custom")

# variable name -> attribute of ReferenceScaling used as its unit
_UNITS = {"x": "x_r", "y": "x_r", "rho": "rho_r", "u": "u_r", "v": "u_r", "u1": "u_r",
          "u2": "u_r", "p": "p_r", "t": "t_r", "c": "c_r"}


@dataclass(frozen=True)
class ReferenceScaling:
    """Reference values ``phi = phi_r * phi_hat`` with p_r = rho_r c_r^2, c_r = u_r / M."""

    x_r: float = 1.0
    rho_r: float = 1.0
    u_r: float = 1.0
    c_r: float = 1.0
    t_r: float = 1.0
    p_r: float = 1.0

    @classmethod
    def from_mach(cls, x_r, rho_r, u_r, mach) -> "ReferenceScaling":
        c_r = u_r / mach
        return cls(x_r, rho_r, u_r, c_r, x_r / u_r, rho_r * c_r**2)

    @property
    def mach(self) -> float:
        return self.u_r / self.c_r

    def unit(self, name: str) -> float:
        if name == "e":
            return self.p_r / self.rho_r
        if name == "mach_local":
            return 1.0
        return getattr(self, _UNITS[name])

    def to_dimensional(self, values: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        return {k: np.asarray(v) * self.unit(k) for k, v in values.items()}

    def to_nondimensional(self, values: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        return {k: np.asarray(v) / self.unit(k) for k, v in values.items()}


Profile = Callable[..., Tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass
class CaseSpec:
    """A benchmark: geometry, closure, scaling and the dimensional initial profile.

    ``profile(x[, y])`` returns dimensional ``(rho, u, p)`` with velocity
    components first. ``mach`` is the Mach parameter of the scaled equations.
    """

    name: str
    gamma: float
    mach: float
    boundary: Tuple[str, ...]
    x_range: Tuple[float, float]
    y_range: Optional[Tuple[float, float]]
    t_end: float
    scaling: ReferenceScaling
    profile: Profile
    default_n: int = 100
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in CASE_NAMES:
            raise ValueError(f"unknown case {self.name!r}; expected one of {CASE_NAMES}")

    @property
    def dim(self) -> int:
        return 1 if self.y_range is None else 2

    def make_grid(self, nx=None, ny=None) -> Grid:
        nx = self.default_n if nx is None else int(nx)
        if self.dim == 1:
            return Grid(nx, 0, self.x_range, boundary=self.boundary)
        ny = nx if not ny else int(ny)
        return Grid(nx, ny, self.x_range, self.y_range, self.boundary)

    def dimensional_state(self, grid: Grid) -> Dict[str, np.ndarray]:
        coords = grid.mesh()
        rho, u, p = self.profile(*(c * 1.0 for c in coords))
        rho = np.broadcast_to(np.asarray(rho, dtype=float), grid.shape).copy()
        u = np.asarray(u, dtype=float).reshape((grid.dim,) + grid.shape)
        p = np.broadcast_to(np.asarray(p, dtype=float), grid.shape).copy()
        out = {"rho": rho, "u1": u[0], "p": p}
        if grid.dim == 2:
            out["u2"] = u[1]
        return out

    def nondimensional_state(self, grid: Grid) -> Dict[str, np.ndarray]:
        return self.scaling.to_nondimensional(self.dimensional_state(grid))

    def initial_field(self, grid: Grid) -> ConservedField:
        s = self.nondimensional_state(grid)
        u = np.stack([s["u1"]] + ([s["u2"]] if grid.dim == 2 else []))
        return field_from_primitive(grid, s["rho"], u, s["p"], self.mach, self.gamma)

    def with_options(self, **changes) -> "CaseSpec":
        return dataclasses.replace(self, **changes)


def _riemann_profile(left, right, x0):
    def profile(x):
        is_left = x < x0
        vals = [np.where(is_left, l, r) for l, r in zip(left, right)]
        return vals[0], vals[1][np.newaxis], vals[2]
    return profile


def init_sod(nx=None) -> CaseSpec:
    """Sod tube: (1, 0, 1) | (0.125, 0, 0.1) at x = 0.5, gamma 1.4, M = 1."""
    return CaseSpec("sod", 1.4, 1.0, ("zero_gradient",), (0.0, 1.0), None, 0.1644,
                    ReferenceScaling(), _riemann_profile((1.0, 0.0, 1.0), (0.125, 0.0, 0.1), 0.5),
                    default_n=200 if nx is None else nx)


def init_mach_shock(mach=6.2e-3, t_end=None) -> CaseSpec:
    """Weak shock whose contact moves at Mach ``mach``.

    Dimensional data (1, 0, 0.4) | (1, 0.008, 0.399) in SI units at x = 0.5.
    With x_r = 1 m, rho_r = 1 kg/m^3 and u_r = M m/s the scaled velocity on
    the right is 0.008/M. ``t_end`` is in scheme time units; the default
    0.25 / M is the dimensional 0.25 s at the time unit t_r = M s.
    """
    if not mach > 0:
        raise ValueError(f"mach must be positive, got {mach}")
    scaling = dataclasses.replace(ReferenceScaling.from_mach(1.0, 1.0, mach, mach), t_r=mach)
    t_end = 0.25 / mach if t_end is None else t_end
    return CaseSpec("mach_shock", 1.4, float(mach), ("zero_gradient",), (0.0, 1.0), None,
                    t_end, scaling,
                    _riemann_profile((1.0, 0.0, 0.4), (1.0, 0.008, 0.399), 0.5),
                    default_n=50, params={"nominal_mach": float(mach)})


GRESHO_CENTER = (0.5, 0.5)
GRESHO_U_REF = 2.0 * 0.2 * np.pi


def gresho_velocity(r):
    """Piecewise-linear angular velocity of the classical vortex, peak 1 at r = 0.2."""
    r = np.asarray(r, dtype=float)
    return np.where(r < 0.2, 5.0 * r, np.where(r < 0.4, 2.0 - 5.0 * r, 0.0))


def gresho_pressure_offset(r):
    """Pressure minus the background p0 for the classical vortex."""
    r = np.asarray(r, dtype=float)
    rs = np.maximum(r, 1e-300)
    inner = 12.5 * r**2
    mid = 12.5 * r**2 + 4.0 * (1.0 - 5.0 * r - np.log(0.2) + np.log(rs))
    outer = -2.0 + 4.0 * np.log(2.0)
    return np.where(r < 0.2, inner, np.where(r < 0.4, mid, outer))


def smooth_gresho_velocity(r):
    """C^1 angular velocity, peak 1 at r = 0.2, zero from r = 0.4 on."""
    r = np.asarray(r, dtype=float)
    inner = 75.0 * r**2 - 250.0 * r**3
    mid = -4.0 + 60.0 * r - 225.0 * r**2 + 250.0 * r**3
    return np.where(r < 0.2, inner, np.where(r < 0.4, mid, 0.0))


def _p2(r):
    r = np.maximum(np.asarray(r, dtype=float), 1e-300)
    return (65.8843399322788 - 480.0 * r + 2700.0 * r**2 - (9666.0 + 2.0 / 3.0) * r**3
            + 20156.25 * r**4 - 22500.0 * r**5 + (10416.0 + 2.0 / 3.0) * r**6
            + 16.0 * np.log(r))


def smooth_gresho_pressure_offset(r):
    """Pressure minus p0 balancing the centrifugal force of the smooth profile."""
    r = np.asarray(r, dtype=float)
    inner = 1406.25 * r**4 - 7500.0 * r**5 + (10416.0 + 2.0 / 3.0) * r**6
    return np.where(r < 0.2, inner, np.where(r < 0.4, _p2(r), _p2(0.4)))


# first entry is the default
GRESHO_SCALINGS = ("gamma_reduced", "sound_speed")


def _vortex_case(name, mach, gamma, velocity, offset, scaling_kind, t_end, n):
    if not 0 < mach <= 1:
        raise ValueError(f"mach must lie in (0, 1], got {mach}")
    if scaling_kind not in GRESHO_SCALINGS:
        raise ValueError(f"unknown vortex scaling {scaling_kind!r}")
    rho0, umax = 1.0, 1.0
    p0 = rho0 * umax**2 / (gamma * mach**2)
    u_r = GRESHO_U_REF
    # scheme Mach parameter; the second choice takes p_r = rho0 u_r^2 / (gamma M^2)
    scheme_mach = mach if scaling_kind == "sound_speed" else np.sqrt(gamma) * mach
    scaling = ReferenceScaling.from_mach(1.0, rho0, u_r, scheme_mach)
    x0, y0 = GRESHO_CENTER

    def profile(x, y):
        dx, dy = x - x0, y - y0
        r = np.hypot(dx, dy)
        uphi = velocity(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(r > 0, uphi / np.where(r > 0, r, 1.0), 0.0)
        u = np.stack([-ratio * dy, ratio * dx])
        return np.full_like(r, rho0), u, p0 + offset(r)

    return CaseSpec(name, gamma, float(scheme_mach), ("periodic", "periodic"), (0.0, 1.0),
                    (0.0, 1.0), t_end, scaling, profile, default_n=40,
                    params={"nominal_mach": float(mach), "p0": p0})


def init_gresho(mach, gamma=5.0 / 3.0, scaling="gamma_reduced", t_end=1.0) -> CaseSpec:
    """Classical Gresho vortex on the periodic unit square; ``t_end = 1`` is one turn."""
    return _vortex_case("gresho", mach, gamma, gresho_velocity, gresho_pressure_offset,
                        scaling, t_end, 40)


def init_smooth_gresho(mach, gamma=5.0 / 3.0, scaling="gamma_reduced", t_end=0.05) -> CaseSpec:
    """Stationary vortex with a C^1 velocity profile, used for convergence studies."""
    return _vortex_case("smooth_gresho", mach, gamma, smooth_gresho_velocity,
                        smooth_gresho_pressure_offset, scaling, t_end, 40)


def custom_case(profile: Profile, gamma=1.4, mach=1.0, boundary=("periodic",),
                x_range=(0.0, 1.0), y_range=None, t_end=0.1,
                scaling: Optional[ReferenceScaling] = None, default_n=100) -> CaseSpec:
    """Wrap a user profile ``(x[, y]) -> (rho, u, p)`` given in scheme units."""
    return CaseSpec("custom", gamma, mach, tuple(boundary), x_range, y_range, t_end,
                    scaling or ReferenceScaling(), profile, default_n)


def make_case(name: str, mach=None, gamma=None, **kw) -> CaseSpec:
    """Build a named case; ``mach``/``gamma`` of None keep the case defaults."""
    if name == "sod":
        case = init_sod()
        if mach is not None and mach != 1.0:
            case = case.with_options(mach=float(mach))
    elif name == "mach_shock":
        case = init_mach_shock(6.2e-3 if mach is None else mach)
    elif name in ("gresho", "smooth_gresho"):
        init = init_gresho if name == "gresho" else init_smooth_gresho
        case = init(1e-2 if mach is None else mach, **({"gamma": gamma} if gamma else {}), **kw)
        gamma = None
    elif name == "custom":
        raise ValueError("the custom case needs a profile; use custom_case()")
    else:
        raise ValueError(f"unknown case {name!r}; expected one of {CASE_NAMES}")
    if gamma is not None:
        case = case.with_options(gamma=float(gamma))
    return case
