"""Error norms, convergence rates and per-step monitors."""

from __future__ import annotations

from typing import Dict, List, Sequence

import numpy as np

from .mesh import ConservedField, Grid, centered_divergence, primitives

VARIABLES_1D = ("rho", "u1", "p")
VARIABLES_2D = ("rho", "u1", "u2", "p")


def primitive_arrays(fld: ConservedField, grid: Grid, mach, gamma) -> Dict[str, np.ndarray]:
    """Interior arrays of rho, u1 (, u2), p and e."""
    prim = primitives(fld, mach, grid.interior)
    out = {"rho": prim.rho, "u1": prim.u[0]}
    if grid.dim == 2:
        out["u2"] = prim.u[1]
    out["p"] = (gamma - 1.0) * prim.rho * prim.e
    out["e"] = prim.e
    return out


def l1_error(fld: ConservedField, reference, grid: Grid, mach, gamma) -> Dict[str, float]:
    """Cell-volume-weighted L1 differences of the primitive variables.

    ``reference`` is another field on the same grid or a mapping of interior
    arrays keyed like :func:`primitive_arrays`.
    """
    mine = primitive_arrays(fld, grid, mach, gamma)
    if isinstance(reference, ConservedField):
        reference = primitive_arrays(reference, grid, mach, gamma)
    names = VARIABLES_1D if grid.dim == 1 else VARIABLES_2D
    return {k: float(np.sum(np.abs(mine[k] - reference[k])) * grid.cell_volume) for k in names}


def convergence_rate(n_coarse, err_coarse, n_fine, err_fine) -> float:
    """Observed order between two resolutions, ``log(e_c/e_f) / log(N_f/N_c)``."""
    if err_coarse <= 0 or err_fine <= 0:
        return float("nan")
    return float(np.log(err_coarse / err_fine) / np.log(n_fine / n_coarse))


def convergence_rates(ns: Sequence[int], errors: Sequence[float]) -> List[float]:
    """Rates between consecutive levels; one entry shorter than ``ns``."""
    return [convergence_rate(ns[i], errors[i], ns[i + 1], errors[i + 1])
            for i in range(len(ns) - 1)]


def kinetic_energy(fld: ConservedField, grid: Grid) -> float:
    """Integral of rho |u|^2 / 2 over the interior (no Mach weighting)."""
    core = fld.interior(grid)
    return float(0.5 * np.sum(np.sum(core[1:-1] ** 2, axis=0) / core[0]) * grid.cell_volume)


def max_divergence(fld: ConservedField, grid: Grid) -> float:
    """max |centered div u| over interior cells; ghosts must be filled."""
    u = fld.mom / fld.rho
    return float(np.max(np.abs(centered_divergence(u, grid))))


def fluctuation(values: np.ndarray) -> float:
    """max |q - mean(q)| of an interior array."""
    return float(np.max(np.abs(values - values.mean())))


def pressure_fluctuation(fld: ConservedField, grid: Grid, mach, gamma) -> float:
    return fluctuation(primitive_arrays(fld, grid, mach, gamma)["p"])


def fitted_exponent(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    return float(np.polyfit(np.log(np.asarray(xs)), np.log(np.asarray(ys)), 1)[0])


class DiagnosticsRecord:
    """Time series of conserved totals, kinetic energy, divergence and pressure spread."""

    def __init__(self, grid: Grid, mach, gamma):
        self.grid = grid
        self.mach = mach
        self.gamma = gamma
        self.times: List[float] = []
        self.totals: List[np.ndarray] = []
        self.kinetic: List[float] = []
        self.divergence: List[float] = []
        self.pressure_spread: List[float] = []

    def record(self, t, fld: ConservedField) -> None:
        g = self.grid
        core = fld.interior(g)
        self.times.append(float(t))
        self.totals.append(core.reshape(core.shape[0], -1).sum(axis=1) * g.cell_volume)
        self.kinetic.append(kinetic_energy(fld, g))
        self.divergence.append(max_divergence(fld, g))
        self.pressure_spread.append(pressure_fluctuation(fld, g, self.mach, self.gamma))

    def kinetic_ratio(self) -> float:
        return self.kinetic[-1] / self.kinetic[0] if self.kinetic and self.kinetic[0] else float("nan")

    def kinetic_curve(self) -> np.ndarray:
        """E_kin(t) / E_kin(0) at every recorded time."""
        return np.asarray(self.kinetic) / self.kinetic[0]

    def as_rows(self):
        for i, t in enumerate(self.times):
            yield {"t": t, "mass": float(self.totals[i][0]), "energy": float(self.totals[i][-1]),
                   "kinetic": self.kinetic[i], "max_div": self.divergence[i],
                   "p_fluct": self.pressure_spread[i]}
