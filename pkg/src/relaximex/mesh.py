"""Cartesian grids, cell fields with a two-cell ghost frame, and state conversions.

Every cell array carries ``NGHOST`` ghost layers on each side of each axis.
Arrays are indexed ``[..., i]`` in 1D and ``[..., i, j]`` in 2D, with ``i``
running along x and ``j`` along y. Vector quantities put their component axis
first, so the momentum of a 2D field has shape ``(2, nx + 4, ny + 4)``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

NGHOST = 2
BOUNDARY_KINDS = ("periodic", "zero_gradient")


class AdmissibilityError(ValueError):
    """A cell left the admissible set (non-positive density or internal energy)."""

    def __init__(self, message, cells=None):
        super().__init__(message)
        self.cells = cells


@dataclass(frozen=True)
class Grid:
    """Uniform Cartesian grid in one or two dimensions.

    ``ny == 0`` selects a 1D grid. ``boundary`` holds one kind per axis.
    """

    nx: int
    ny: int = 0
    x_range: Tuple[float, float] = (0.0, 1.0)
    y_range: Tuple[float, float] = (0.0, 1.0)
    boundary: Tuple[str, ...] = ("periodic",)

    def __post_init__(self):
        bc = tuple(self.boundary)
        if len(bc) == 1 and self.ny > 0:
            bc = bc * 2
        object.__setattr__(self, "boundary", bc)
        if self.nx < 3 or (self.ny != 0 and self.ny < 3):
            raise ValueError(f"need at least 3 cells per axis, got nx={self.nx}, ny={self.ny}")
        if len(bc) != self.dim:
            raise ValueError(f"expected {self.dim} boundary kinds, got {bc}")
        for kind in bc:
            if kind not in BOUNDARY_KINDS:
                raise ValueError(f"unknown boundary kind {kind!r}")
        for lo, hi in self.ranges:
            if not hi > lo:
                raise ValueError(f"empty domain extent ({lo}, {hi})")

    @property
    def dim(self) -> int:
        return 1 if self.ny == 0 else 2

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.nx,) if self.dim == 1 else (self.nx, self.ny)

    @property
    def padded_shape(self) -> Tuple[int, ...]:
        return tuple(n + 2 * NGHOST for n in self.shape)

    @property
    def ranges(self):
        return (self.x_range,) if self.dim == 1 else (self.x_range, self.y_range)

    @property
    def spacing(self) -> Tuple[float, ...]:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.ranges, self.shape))

    @property
    def dx(self) -> float:
        return self.spacing[0]

    @property
    def dy(self) -> float:
        return self.spacing[1] if self.dim == 2 else 0.0

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @property
    def interior(self) -> Tuple[slice, ...]:
        return tuple(slice(NGHOST, NGHOST + n) for n in self.shape)

    def centers(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along ``axis`` (interior cells only)."""
        lo, _ = self.ranges[axis]
        h = self.spacing[axis]
        return lo + (np.arange(self.shape[axis]) + 0.5) * h

    def mesh(self) -> Tuple[np.ndarray, ...]:
        """Interior cell-center coordinate arrays, broadcast to ``shape``."""
        return np.meshgrid(*[self.centers(k) for k in range(self.dim)], indexing="ij")


def fill_ghosts(arr: np.ndarray, grid: Grid) -> np.ndarray:
    """Refresh the ghost frame of ``arr`` in place and return it.

    ``arr`` may carry leading component axes; the trailing ``grid.dim`` axes
    are the padded cell axes.
    """
    g = NGHOST
    lead = arr.ndim - grid.dim
    for axis, (n, kind) in enumerate(zip(grid.shape, grid.boundary)):
        ax = lead + axis

        def sl(start, stop):
            idx = [slice(None)] * arr.ndim
            idx[ax] = slice(start, stop)
            return tuple(idx)

        if kind == "periodic":
            arr[sl(0, g)] = arr[sl(n, n + g)]
            arr[sl(n + g, n + 2 * g)] = arr[sl(g, 2 * g)]
        else:
            arr[sl(0, g)] = arr[sl(g, g + 1)]
            arr[sl(n + g, n + 2 * g)] = arr[sl(n + g - 1, n + g)]
    return arr


@dataclass
class ConservedField:
    """Cell averages of (rho, rho*u, E) stacked as ``data[var, *cells]``."""

    data: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid) -> "ConservedField":
        return cls(np.zeros((2 + grid.dim,) + grid.padded_shape))

    @property
    def dim(self) -> int:
        return self.data.shape[0] - 2

    @property
    def rho(self) -> np.ndarray:
        return self.data[0]

    @property
    def mom(self) -> np.ndarray:
        return self.data[1:1 + self.dim]

    @property
    def E(self) -> np.ndarray:
        return self.data[-1]

    def copy(self) -> "ConservedField":
        return ConservedField(self.data.copy())

    def fill_ghosts(self, grid: Grid) -> "ConservedField":
        fill_ghosts(self.data, grid)
        return self

    def interior(self, grid: Grid) -> np.ndarray:
        return self.data[(slice(None),) + grid.interior]


@dataclass
class RelaxationField:
    """Relaxed slow pressure ``pi`` and fast pressure ``psi`` per cell."""

    pi: np.ndarray
    psi: np.ndarray

    def copy(self) -> "RelaxationField":
        return RelaxationField(self.pi.copy(), self.psi.copy())


@dataclass
class PrimitiveState:
    """Primitive variables of one cell, one interface side, or arrays of them.

    ``u`` has the velocity components on its first axis.
    """

    rho: np.ndarray
    u: np.ndarray
    e: np.ndarray
    pi: Optional[np.ndarray] = None
    psi: Optional[np.ndarray] = None

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.u.ndim == self.rho.ndim:
            self.u = self.u[np.newaxis]
        self.e = np.asarray(self.e, dtype=float)
        if self.pi is not None:
            self.pi = np.asarray(self.pi, dtype=float)
        if self.psi is not None:
            self.psi = np.asarray(self.psi, dtype=float)

    def replace(self, **changes) -> "PrimitiveState":
        return dataclasses.replace(self, **changes)


def kinetic_energy_density(rho, mom, mach):
    """Kinetic part of the total energy, 0.5 * M^2 * rho * |u|^2."""
    return 0.5 * mach**2 * np.sum(mom**2, axis=0) / rho


def conserved_to_primitive(rho, mom, E, mach, gamma=None) -> PrimitiveState:
    """Velocity and specific internal energy from conserved variables.

    ``gamma`` is accepted for signature symmetry; the conversion does not
    depend on the equation of state. ``pi`` and ``psi`` are left unset.
    """
    rho = np.asarray(rho, dtype=float)
    mom = np.asarray(mom, dtype=float)
    if mom.ndim == rho.ndim:
        mom = mom[np.newaxis]
    bad = ~(rho > 0)
    if np.any(bad):
        cells = np.argwhere(bad)
        raise AdmissibilityError(f"non-positive density in cell(s) {cells[:5].tolist()}", cells)
    u = mom / rho
    e = (np.asarray(E, dtype=float) - kinetic_energy_density(rho, mom, mach)) / rho
    return PrimitiveState(rho, u, e)


def primitive_to_conserved(state: PrimitiveState, mach, gamma=None):
    """Return ``(rho, mom, E)`` for a primitive state."""
    rho = state.rho
    mom = rho * state.u
    E = rho * state.e + 0.5 * mach**2 * rho * np.sum(state.u**2, axis=0)
    return rho, mom, E


def field_from_primitive(grid: Grid, rho, u, p, mach, gamma) -> ConservedField:
    """Build a ghost-filled field from interior arrays of rho, velocity, pressure."""
    fld = ConservedField.zeros(grid)
    u = np.asarray(u, dtype=float)
    if u.ndim == grid.dim:
        u = u[np.newaxis]
    e = np.asarray(p, dtype=float) / ((gamma - 1.0) * np.asarray(rho, dtype=float))
    r, m, E = primitive_to_conserved(PrimitiveState(rho, u, e), mach)
    inner = grid.interior
    fld.data[(0,) + inner] = r
    fld.data[(slice(1, 1 + grid.dim),) + inner] = m
    fld.data[(-1,) + inner] = E
    return fld.fill_ghosts(grid)


def primitives(fld: ConservedField, mach, region=None) -> PrimitiveState:
    """Primitive state of every cell of ``fld`` (or of ``region``)."""
    data = fld.data if region is None else fld.data[(slice(None),) + tuple(region)]
    dim = data.shape[0] - 2
    return conserved_to_primitive(data[0], data[1:1 + dim], data[-1], mach)


def internal_energy(fld: ConservedField, mach) -> np.ndarray:
    return (fld.E - kinetic_energy_density(fld.rho, fld.mom, mach)) / fld.rho


def is_admissible(fld: ConservedField, grid: Grid, mach) -> bool:
    inner = fld.interior(grid)
    rho = inner[0]
    if not np.all(rho > 0):
        return False
    e = (inner[-1] - kinetic_energy_density(rho, inner[1:-1], mach)) / rho
    return bool(np.all(e > 0))


def check_admissible(fld: ConservedField, grid: Grid, mach) -> None:
    """Raise :class:`AdmissibilityError` naming the offending interior cells."""
    inner = fld.interior(grid)
    rho = inner[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        e = (inner[-1] - kinetic_energy_density(rho, inner[1:-1], mach)) / rho
    bad = ~((rho > 0) & (e > 0))
    if np.any(bad):
        cells = np.argwhere(bad)
        raise AdmissibilityError(
            f"inadmissible state in {len(cells)} cell(s), first {cells[:5].tolist()}", cells)


def centered_divergence(u: np.ndarray, grid: Grid) -> np.ndarray:
    """Centered divergence of a ghost-filled velocity on the interior cells."""
    g = NGHOST
    div = np.zeros(grid.shape)
    for axis, (n, h) in enumerate(zip(grid.shape, grid.spacing)):
        comp = u[axis]
        hi = list(grid.interior)
        lo = list(grid.interior)
        hi[axis] = slice(g + 1, g + n + 1)
        lo[axis] = slice(g - 1, g + n - 1)
        div += (comp[tuple(hi)] - comp[tuple(lo)]) / (2.0 * h)
    return div


@dataclass
class WellPreparedReport:
    rho_deviation: float
    p_deviation: float
    max_divergence: float
    mach: float
    verdict: bool


def is_well_prepared(fld: ConservedField, grid: Grid, mach, gamma, tol=10.0,
                     div_tol=None) -> WellPreparedReport:
    """Diagnose how close a field is to well-prepared low-Mach data.

    Deviations are relative to the interior mean: max|rho - <rho>|/<rho> is
    compared against ``tol * M`` and the pressure analog against ``tol * M**2``.
    The centered divergence of the velocity is compared against ``div_tol``
    (defaults to ``tol``).
    """
    fld = fld.copy().fill_ghosts(grid)
    prim = primitives(fld, mach)
    inner = grid.interior
    rho = prim.rho[inner]
    p = (gamma - 1.0) * rho * prim.e[inner]
    rho_dev = float(np.max(np.abs(rho - rho.mean())) / rho.mean())
    p_dev = float(np.max(np.abs(p - p.mean())) / p.mean())
    div = float(np.max(np.abs(centered_divergence(prim.u, grid))))
    div_tol = tol if div_tol is None else div_tol
    ok = rho_dev <= tol * mach and p_dev <= tol * mach**2 and div <= div_tol
    return WellPreparedReport(rho_dev, p_dev, div, float(mach), bool(ok))


@dataclass
class RunConfig:
    """Numerical parameters of a run.

    ``cfl`` defaults to 0.9 of the positivity bound 1/(2 d order) once the
    dimension is known (see :meth:`resolved`).
    """

    mach: float = 1.0
    gamma: float = 1.4
    cfl: Optional[float] = None
    order: int = 1
    t_end: float = 0.1
    a_safety: float = 1.05
    stability_floor: bool = True
    lin_tol: float = 1e-10
    lin_maxiter: int = 500
    preconditioner: str = "ilu"
    variable_stage_steps: bool = False
    output_every: int = 0
    format: str = "csv"
    output_dir: Optional[str] = None
    max_steps: int = 10**7
    experimental: bool = field(default=False, repr=False)

    @staticmethod
    def cfl_bound(dim: int, order: int) -> float:
        return 1.0 / (2 * dim * order)

    def resolved(self, dim: int) -> "RunConfig":
        cfg = dataclasses.replace(self)
        if cfg.cfl is None:
            cfg.cfl = 0.9 * self.cfl_bound(dim, cfg.order)
        cfg.validate(dim)
        return cfg

    def validate(self, dim: Optional[int] = None) -> None:
        if not self.mach > 0:
            raise ValueError(f"mach must be positive, got {self.mach}")
        if self.mach > 1:
            self.experimental = True
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if not self.a_safety > 1:
            raise ValueError(f"a_safety must exceed 1, got {self.a_safety}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if not self.lin_tol > 0:
            raise ValueError(f"lin_tol must be positive, got {self.lin_tol}")
        if self.lin_maxiter < 1:
            raise ValueError(f"lin_maxiter must be at least 1, got {self.lin_maxiter}")
        if self.preconditioner not in ("jacobi", "ilu"):
            raise ValueError(f"preconditioner must be 'jacobi' or 'ilu', got {self.preconditioner!r}")
        if self.format not in ("csv", "vtk"):
            raise ValueError(f"format must be 'csv' or 'vtk', got {self.format!r}")
        if self.cfl is not None:
            if not self.cfl > 0:
                raise ValueError(f"cfl must be positive, got {self.cfl}")
            if dim is not None and not self.cfl < self.cfl_bound(dim, self.order):
                raise ValueError(
                    f"cfl must be below 1/(2*{dim}*{self.order}) = "
                    f"{self.cfl_bound(dim, self.order):g}, got {self.cfl}")


def interior_total(arr: np.ndarray, grid: Grid) -> np.ndarray:
    """Integral of a (possibly multi-component) cell array over the interior."""
    lead = arr.ndim - grid.dim
    sub = arr[(slice(None),) * lead + grid.interior]
    axes = tuple(range(lead, arr.ndim))
    return np.sum(sub, axis=axes) * grid.cell_volume

