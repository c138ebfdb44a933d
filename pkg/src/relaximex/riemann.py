"""Approximate Riemann solver of the explicit relaxation subsystem and the
conservative Godunov-type update of (rho, rho*u, E).

All routines are vectorised: every field of a :class:`PrimitiveState` may be
an array, with velocity components on the first axis. ``axis`` selects the
velocity component normal to the interface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import (NGHOST, ConservedField, Grid, PrimitiveState, RelaxationField,
                   fill_ghosts, kinetic_energy_density, primitives)

# speeds below this magnitude count as zero when selecting the flux state
ZERO_SPEED = 1e-12


class PositivityBreach(RuntimeError):
    """Non-positive star specific volume or an inadmissible updated cell."""

    def __init__(self, message, where=None, data=None, kind="update"):
        super().__init__(message)
        self.where = where
        self.data = data
        self.kind = kind


def fast_pressure_factor(mach):
    """(1 - M^2) / M^2, the weight of psi in the momentum flux."""
    return (1.0 - mach**2) / mach**2


@dataclass
class RiemannFan:
    """Four constant states separated by the waves lam_minus <= u_star <= lam_plus."""

    left: PrimitiveState
    right: PrimitiveState
    axis: int
    a: float
    mach: float
    u_star: np.ndarray
    rho_star_l: np.ndarray
    rho_star_r: np.ndarray
    pi_star_l: np.ndarray
    pi_star_r: np.ndarray
    e_star_l: np.ndarray
    e_star_r: np.ndarray
    lam_minus: np.ndarray
    lam_plus: np.ndarray

    @property
    def lam_u(self):
        return self.u_star

    @property
    def psi_star_l(self):
        return self.left.psi

    @property
    def psi_star_r(self):
        return self.right.psi

    def _star(self, side):
        outer = self.left if side == "l" else self.right
        u = outer.u.copy()
        u[self.axis] = self.u_star
        return PrimitiveState(getattr(self, f"rho_star_{side}"), u,
                              getattr(self, f"e_star_{side}"),
                              getattr(self, f"pi_star_{side}"), outer.psi)

    def star_left(self) -> PrimitiveState:
        return self._star("l")

    def star_right(self) -> PrimitiveState:
        return self._star("r")


def solve_riemann(left: PrimitiveState, right: PrimitiveState, a, mach, axis=0,
                  check=True) -> RiemannFan:
    """Intermediate states of the explicit relaxation subsystem.

    The star internal energies follow from the Riemann invariant
    ``e - M^2 pi^2 / (2 a^2) - (1 - M^2) pi psi / a^2`` across the outer waves.
    With ``check`` a non-positive star specific volume raises
    :class:`PositivityBreach`; it signals a relaxation parameter that is too small.
    """
    k = fast_pressure_factor(mach)
    m2 = mach**2
    u_l = left.u[axis]
    u_r = right.u[axis]
    dpsi = left.psi - right.psi
    u_star = 0.5 * (u_l + u_r) + (0.5 / a) * ((left.pi - right.pi) + k * dpsi)
    pi_mean = 0.5 * (left.pi + right.pi) + 0.5 * a * (u_l - u_r)
    pi_star_l = pi_mean - 0.5 * k * dpsi
    pi_star_r = pi_mean + 0.5 * k * dpsi
    tau_star_l = 1.0 / left.rho + (u_star - u_l) / a
    tau_star_r = 1.0 / right.rho + (u_r - u_star) / a
    if check:
        bad = ~((tau_star_l > 0) & (tau_star_r > 0))
        if np.any(bad):
            where = np.argwhere(bad)
            raise PositivityBreach(
                f"non-positive star specific volume at {len(where)} interface(s), "
                f"first {where[:3].tolist()}; relaxation parameter a={a:g} too small",
                where, {"tau_star_l": tau_star_l[bad], "tau_star_r": tau_star_r[bad]}, "star")
    dpi_l = pi_star_l - left.pi
    dpi_r = pi_star_r - right.pi
    e_star_l = left.e + dpi_l * (0.5 * m2 * (pi_star_l + left.pi) + (1.0 - m2) * left.psi) / a**2
    e_star_r = right.e + dpi_r * (0.5 * m2 * (pi_star_r + right.pi) + (1.0 - m2) * right.psi) / a**2
    with np.errstate(divide="ignore"):
        rho_star_l = 1.0 / tau_star_l
        rho_star_r = 1.0 / tau_star_r
    return RiemannFan(left, right, axis, a, mach, u_star, rho_star_l, rho_star_r,
                      pi_star_l, pi_star_r, e_star_l, e_star_r,
                      u_l - a / left.rho, u_r + a / right.rho)


def physical_flux(state: PrimitiveState, mach, axis=0):
    """First d+2 components of the explicit relaxation flux at ``state``."""
    k = fast_pressure_factor(mach)
    m2 = mach**2
    rho, u = state.rho, state.u
    un = u[axis]
    E = rho * state.e + 0.5 * m2 * rho * np.sum(u**2, axis=0)
    flux = np.empty((u.shape[0] + 2,) + np.shape(rho))
    flux[0] = rho * un
    flux[1:-1] = rho * un * u
    flux[1 + axis] += state.pi + k * state.psi
    flux[-1] = un * (E + m2 * state.pi + (1.0 - m2) * state.psi)
    return flux


def relaxation_flux_rows(state: PrimitiveState, a, axis=0):
    """Fluxes of (rho*pi, rho*psi): ``rho pi u + a^2 u`` and ``rho psi u``."""
    un = state.u[axis]
    return np.stack([state.rho * state.pi * un + a**2 * un, state.rho * state.psi * un])


def euler_flux(rho, u, e, p, mach, axis=0):
    """Flux of the non-dimensional Euler equations at (rho, u, e, p)."""
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.ndim == rho.ndim:
        u = u[np.newaxis]
    un = u[axis]
    E = rho * e + 0.5 * mach**2 * rho * np.sum(u**2, axis=0)
    flux = np.empty((u.shape[0] + 2,) + rho.shape)
    flux[0] = rho * un
    flux[1:-1] = rho * un * u
    flux[1 + axis] += p / mach**2
    flux[-1] = un * (E + p)
    return flux


def _snap(speed):
    return np.where(np.abs(speed) < ZERO_SPEED, 0.0, speed)


def selected_state(fan: RiemannFan) -> PrimitiveState:
    """State of the fan at x/t = 0; a zero speed picks the state on its left."""
    lm, lu, lp = _snap(fan.lam_minus), _snap(fan.u_star), _snap(fan.lam_plus)
    take_l = lm >= 0
    take_sl = ~take_l & (lu >= 0)
    take_sr = ~take_l & ~take_sl & (lp >= 0)
    conds = [take_l, take_sl, take_sr]
    L, R = fan.left, fan.right

    def pick(vl, vsl, vsr, vr):
        return np.select(conds, np.broadcast_arrays(vl, vsl, vsr, vr)[:3],
                         np.broadcast_to(vr, np.shape(take_l)))

    u = np.empty_like(np.broadcast_arrays(L.u, R.u)[0])
    for comp in range(u.shape[0]):
        if comp == fan.axis:
            u[comp] = pick(L.u[comp], fan.u_star, fan.u_star, R.u[comp])
        else:
            u[comp] = pick(L.u[comp], L.u[comp], R.u[comp], R.u[comp])
    return PrimitiveState(
        pick(L.rho, fan.rho_star_l, fan.rho_star_r, R.rho), u,
        pick(L.e, fan.e_star_l, fan.e_star_r, R.e),
        pick(L.pi, fan.pi_star_l, fan.pi_star_r, R.pi),
        pick(L.psi, L.psi, R.psi, R.psi))


def interface_flux(fan: RiemannFan, mach, gamma=None, with_relaxation=False):
    """Godunov flux through x/t = 0 of the approximate Riemann fan.

    Returns the d+2 physical components; with ``with_relaxation`` the
    (rho*pi, rho*psi) rows are appended.
    """
    state = selected_state(fan)
    flux = physical_flux(state, mach, fan.axis)
    if with_relaxation:
        flux = np.concatenate([flux, relaxation_flux_rows(state, fan.a, fan.axis)])
    return flux


def max_signal_speed(fld: ConservedField, grid: Grid, a, mach=1.0) -> float:
    """max over interior cells and axes of |u_d -+ a/rho|; independent of M."""
    inner = grid.interior
    rho = fld.rho[inner]
    s = 0.0
    for d in range(grid.dim):
        u = fld.mom[d][inner] / rho
        s = max(s, float(np.max(np.abs(u) + a / rho)))
    return s


def time_step(fld: ConservedField, grid: Grid, a, cfl) -> float:
    return cfl * min(grid.spacing) / max_signal_speed(fld, grid, a)


def cell_states(fld: ConservedField, relax: RelaxationField, mach) -> PrimitiveState:
    prim = primitives(fld, mach)
    return prim.replace(pi=relax.pi, psi=relax.psi)


def axis_fluxes(fld: ConservedField, relax: RelaxationField, grid: Grid, a, mach, gamma,
                axis, order=1):
    """Interface fluxes along ``axis`` for the n+1 faces bounding the interior."""
    from .reconstruction import face_states

    left, right = face_states(fld, relax, grid, axis, mach, gamma, order)
    fan = solve_riemann(left, right, a, mach, axis=axis)
    return interface_flux(fan, mach)


def explicit_update(fld: ConservedField, relax: RelaxationField, grid: Grid, a, mach, gamma,
                    dt, order=1, check=True) -> ConservedField:
    """Unsplit conservative update ``w - dt * sum_d (F_{+} - F_{-}) / h_d``.

    ``relax.psi`` must be the implicit-step output with filled ghosts.
    """
    g = NGHOST
    new = fld.copy()
    inner = (slice(None),) + grid.interior
    for axis in range(grid.dim):
        flux = axis_fluxes(fld, relax, grid, a, mach, gamma, axis, order)
        n = grid.shape[axis]
        hi = [slice(None)] * (grid.dim + 1)
        lo = [slice(None)] * (grid.dim + 1)
        hi[1 + axis] = slice(1, n + 1)
        lo[1 + axis] = slice(0, n)
        new.data[inner] -= (dt / grid.spacing[axis]) * (flux[tuple(hi)] - flux[tuple(lo)])
    if check:
        core = new.data[inner]
        rho = core[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            e = (core[-1] - kinetic_energy_density(rho, core[1:-1], mach)) / rho
        bad = ~((rho > 0) & (e > 0))
        if np.any(bad):
            where = np.argwhere(bad)
            raise PositivityBreach(
                f"explicit update left {len(where)} inadmissible cell(s), first {where[:3].tolist()}",
                where + g)
    return new.fill_ghosts(grid)


def diffusion_vector(fld: ConservedField, relax: RelaxationField, grid: Grid, a, mach,
                     gamma, axis=0):
    """Numerical diffusion per face: mean of the Euler fluxes minus the Godunov flux.

    First-order face states are used and ``relax.psi`` should be the
    implicit-step output. Shape ``(d+2, faces...)``.
    """
    from .reconstruction import face_states

    left, right = face_states(fld, relax, grid, axis, mach, gamma, order=1)
    fan = solve_riemann(left, right, a, mach, axis=axis)
    central = 0.5 * (euler_flux(left.rho, left.u, left.e, (gamma - 1) * left.rho * left.e,
                                mach, axis)
                     + euler_flux(right.rho, right.u, right.e,
                                  (gamma - 1) * right.rho * right.e, mach, axis))
    return central - interface_flux(fan, mach)


def explicit_diffusion_vector(fld: ConservedField, grid: Grid, a, mach, gamma, axis=0):
    """Diffusion vector of a fully explicit single-pressure relaxation solver.

    Here the whole pressure p/M^2 is relaxed like pi, so its waves travel at
    u -+ a/(M rho) and the flux is upwinded across the acoustic fan. This is the
    classical Godunov-type reference whose momentum diffusion grows like 1/M.
    """
    from .reconstruction import face_states

    eq = RelaxationField(*(2 * [(gamma - 1) * fld.rho * ((fld.E - kinetic_energy_density(
        fld.rho, fld.mom, mach)) / fld.rho)]))
    left, right = face_states(fld, eq, grid, axis, mach, gamma, order=1)
    inv = 1.0 / mach**2

    def scaled(s):
        p = (gamma - 1) * s.rho * s.e
        return PrimitiveState(s.rho, s.u, s.e * inv, p * inv, p * inv)

    fan = solve_riemann(scaled(left), scaled(right), a / mach, 1.0, axis=axis)
    flux = interface_flux(fan, 1.0)
    flux[-1] *= mach**2
    central = 0.5 * (euler_flux(left.rho, left.u, left.e, (gamma - 1) * left.rho * left.e,
                                mach, axis)
                     + euler_flux(right.rho, right.u, right.e,
                                  (gamma - 1) * right.rho * right.e, mach, axis))
    return central - flux


def conserved_totals(fld: ConservedField, grid: Grid) -> np.ndarray:
    """Interior integrals of every conserved component."""
    core = fld.interior(grid)
    return core.reshape(core.shape[0], -1).sum(axis=1) * grid.cell_volume


__all__ = [
    "PositivityBreach", "RiemannFan", "solve_riemann", "physical_flux", "interface_flux",
    "euler_flux", "max_signal_speed", "time_step", "explicit_update", "diffusion_vector",
    "explicit_diffusion_vector", "selected_state", "relaxation_flux_rows", "axis_fluxes",
    "cell_states", "conserved_totals", "fill_ghosts",
]
