"""Interface states for the explicit fluxes: piecewise constant or limited linear.

Second-order states use minmod slopes of the conserved variables and of the
implicit fast pressure, one axis at a time. The slow pressure at a face is
the equation of state applied to the reconstructed conserved state. A cell
whose reconstruction would give a non-positive internal energy on either face
falls back to zero slopes.
"""

from __future__ import annotations

import numpy as np

from .mesh import (NGHOST, ConservedField, Grid, PrimitiveState, RelaxationField,
                   kinetic_energy_density)


def minmod(x, y):
    """Smaller-magnitude argument when signs agree, zero otherwise."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    same = np.sign(x) * np.sign(y) > 0
    return np.where(same, np.where(np.abs(x) < np.abs(y), x, y), 0.0)


def _window(arr, grid: Grid, axis, start, stop):
    """Cells ``start:stop`` (padded indices) along ``axis``, interior elsewhere."""
    lead = arr.ndim - grid.dim
    idx = [slice(None)] * lead + list(grid.interior)
    idx[lead + axis] = slice(start, stop)
    return arr[tuple(idx)]


def _shift(arr, lead, axis, start, stop):
    idx = [slice(None)] * arr.ndim
    idx[lead + axis] = slice(start, stop)
    return arr[tuple(idx)]


def limited_slopes(q, lead, axis, h):
    """Minmod slopes of ``q`` along ``axis`` for all cells but the outermost two."""
    n = q.shape[lead + axis]
    back = (_shift(q, lead, axis, 1, n - 1) - _shift(q, lead, axis, 0, n - 2)) / h
    fwd = (_shift(q, lead, axis, 2, n) - _shift(q, lead, axis, 1, n - 1)) / h
    return minmod(back, fwd)


def _to_state(cons, psi, mach, gamma, pi=None):
    rho = cons[0]
    mom = cons[1:-1]
    e = (cons[-1] - kinetic_energy_density(rho, mom, mach)) / rho
    if pi is None:
        pi = (gamma - 1.0) * rho * e
    return PrimitiveState(rho, mom / rho, e, pi, psi)


def face_states(fld: ConservedField, relax: RelaxationField, grid: Grid, axis, mach, gamma,
                order=1):
    """Left and right states at the n+1 faces bounding the interior along ``axis``.

    Transverse axes cover interior cells only. Ghost layers must be filled.
    """
    g = NGHOST
    n = grid.shape[axis]
    if order == 1:
        cons = _window(fld.data, grid, axis, g - 1, g + n + 1)
        pi = _window(relax.pi, grid, axis, g - 1, g + n + 1)
        psi = _window(relax.psi, grid, axis, g - 1, g + n + 1)
        lo = slice(0, n + 1)
        hi = slice(1, n + 2)

        def cut(a, lead, s):
            return _shift(a, lead, axis, s.start, s.stop)

        left = _to_state(cut(cons, 1, lo), cut(psi, 0, lo), mach, gamma, cut(pi, 0, lo))
        right = _to_state(cut(cons, 1, hi), cut(psi, 0, hi), mach, gamma, cut(pi, 0, hi))
        return left, right
    if order != 2:
        raise ValueError(f"order must be 1 or 2, got {order}")

    h = grid.spacing[axis]
    # cells g-2 .. g+n+1, slopes for g-1 .. g+n
    q = np.concatenate([_window(fld.data, grid, axis, g - 2, g + n + 2),
                        _window(relax.psi, grid, axis, g - 2, g + n + 2)[np.newaxis]])
    centre = _shift(q, 1, axis, 1, n + 3)
    slope = limited_slopes(q, 1, axis, h)
    minus = centre - 0.5 * h * slope
    plus = centre + 0.5 * h * slope
    bad = ~(_energy_ok(minus, mach) & _energy_ok(plus, mach))
    if np.any(bad):
        slope = np.where(bad[np.newaxis], 0.0, slope)
        minus = centre - 0.5 * h * slope
        plus = centre + 0.5 * h * slope
    lplus = _shift(plus, 1, axis, 0, n + 1)
    rminus = _shift(minus, 1, axis, 1, n + 2)
    left = _to_state(lplus[:-1], lplus[-1], mach, gamma)
    right = _to_state(rminus[:-1], rminus[-1], mach, gamma)
    return left, right


def _energy_ok(q, mach):
    rho = q[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        e = (q[-2] - kinetic_energy_density(rho, q[1:-2], mach)) / rho
    return (rho > 0) & (e > 0)
