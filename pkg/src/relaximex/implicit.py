"""Elliptic update of the fast pressure psi: the whole implicit part of a stage.

Row ``i`` of the system (per axis, summed in 2D) reads::

    psi_i - beta * tau_i * (tau_{i-1/2} psi_{i-1}
                            - (tau_{i-1/2} + tau_{i+1/2}) psi_i
                            + tau_{i+1/2} psi_{i+1})
        = psi_i^n - dt * a**2 * tau_i * (u_{i+1} - u_{i-1}) / (2 dx)

with ``tau = 1/rho``, ``tau_{i+1/2}`` the arithmetic mean of its neighbours
and ``beta = (dt * a / (M * dx))**2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .mesh import (NGHOST, ConservedField, Grid, RelaxationField, centered_divergence,
                   check_admissible, fill_ghosts)

CLOSURES = ("periodic", "zero_gradient", "dirichlet")


class LinearSolverError(RuntimeError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass
class EllipticSystem:
    """Sparse system for psi on the interior cells, flattened in C order.

    ``diag`` and ``offdiag`` keep the stencil coefficients per cell; ``offdiag``
    has one entry per (axis, side), stored as ``[2*axis + side]`` with side 0
    the lower neighbour.
    """

    matrix: sp.csr_matrix
    rhs: np.ndarray
    closure: tuple
    shape: tuple
    diag: np.ndarray
    offdiag: np.ndarray
    beta: tuple
    dirichlet_value: Optional[float] = None

    @property
    def size(self) -> int:
        return self.rhs.size


@dataclass
class SolveInfo:
    iterations: int = 0
    residual: float = 0.0
    method: str = ""


def _beta(dt, a, mach, h):
    return (dt * a / (mach * h)) ** 2


def assemble(fld: ConservedField, relax: RelaxationField, grid: Grid, mach, a, dt,
             closure=None, dirichlet_value=None) -> EllipticSystem:
    """Assemble the elliptic system for psi from equilibrium stage-input data.

    ``closure`` gives one of ``periodic``, ``zero_gradient``, ``dirichlet`` per
    axis and defaults to the grid boundary kinds. Ghost cells of ``fld`` and
    ``relax.psi`` are assumed to be filled for periodic and zero-gradient sides.
    """
    check_admissible(fld, grid, mach)
    closure = tuple(grid.boundary if closure is None else
                    ((closure,) * grid.dim if isinstance(closure, str) else closure))
    for kind in closure:
        if kind not in CLOSURES:
            raise ValueError(f"unknown closure {kind!r}")
    if "dirichlet" in closure and dirichlet_value is None:
        raise ValueError("dirichlet closure needs dirichlet_value")

    g = NGHOST
    inner = grid.interior
    tau_full = 1.0 / fld.rho
    tau = tau_full[inner]
    u = fld.mom / fld.rho
    div = centered_divergence(u, grid)
    rhs = relax.psi[inner] - dt * a**2 * tau * div

    shape = grid.shape
    ncell = int(np.prod(shape))
    index = np.arange(ncell).reshape(shape)
    diag = np.ones(shape)
    offdiag = np.zeros((2 * grid.dim,) + shape)
    rows, cols, vals = [], [], []
    betas = []

    for axis in range(grid.dim):
        n = shape[axis]
        beta = _beta(dt, a, mach, grid.spacing[axis])
        betas.append(beta)
        for side, step in ((0, -1), (1, +1)):
            nb = [s for s in inner]
            nb[axis] = slice(g + step, g + step + n)
            tau_face = 0.5 * (tau + tau_full[tuple(nb)])
            coef = beta * tau * tau_face
            # cells whose neighbour on this side lies outside the domain
            edge = [slice(None)] * grid.dim
            edge[axis] = 0 if step < 0 else n - 1
            edge = tuple(edge)
            at_edge = np.zeros(shape, dtype=bool)
            at_edge[edge] = True

            kind = closure[axis]
            if kind == "zero_gradient":
                # ghost psi equals the cell value: the face term vanishes
                coef = np.where(at_edge, 0.0, coef)
            diag += coef
            offdiag[2 * axis + side] = -coef

            nb_index = np.roll(index, -step, axis=axis)
            mask = np.ones(shape, dtype=bool)
            if kind != "periodic":
                mask &= ~at_edge
                if kind == "dirichlet":
                    rhs = rhs + np.where(at_edge, coef * dirichlet_value, 0.0)
            rows.append(index[mask])
            cols.append(nb_index[mask])
            vals.append(-coef[mask])

    rows.append(index.ravel())
    cols.append(index.ravel())
    vals.append(diag.ravel())
    matrix = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(ncell, ncell)).tocsr()
    return EllipticSystem(matrix, rhs.ravel().copy(), closure, shape, diag, offdiag,
                          tuple(betas), dirichlet_value)


def _solve_tridiagonal(system: EllipticSystem, rhs: np.ndarray) -> np.ndarray:
    """Direct solve of a 1D system; periodic wrap handled by a rank-one update."""
    n = system.size
    lower = system.offdiag[0]
    upper = system.offdiag[1]
    diag = system.diag.copy()
    ab = np.zeros((3, n))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    if system.closure[0] != "periodic":
        return scipy.linalg.solve_banded((1, 1), ab, rhs)
    # A = T + w v^T with corner entries A[0, n-1] = lower[0], A[n-1, 0] = upper[n-1]
    corner_lo = lower[0]
    corner_hi = upper[n - 1]
    gamma = -diag[0]
    ab[1, 0] = diag[0] - gamma
    ab[1, n - 1] = diag[n - 1] - corner_lo * corner_hi / gamma
    w = np.zeros(n)
    w[0] = gamma
    w[n - 1] = corner_hi
    y = scipy.linalg.solve_banded((1, 1), ab, np.column_stack([rhs, w]))
    x, z = y[:, 0], y[:, 1]
    v0, vn = 1.0, corner_lo / gamma
    factor = (x[0] * v0 + x[n - 1] * vn) / (1.0 + z[0] * v0 + z[n - 1] * vn)
    return x - factor * z


def _accuracy(A, x, b, tol) -> float:
    """Relative residual, or the normwise backward error ``|r| / (|A| |x| + |b|)``
    when rounding keeps the residual above ``tol`` (condition numbers grow like
    1/M^2, so that is the best floating point can promise)."""
    r = b - A @ x
    bnorm = np.linalg.norm(b)
    res = float(np.linalg.norm(r) / bnorm)
    if res > tol:
        anorm = float(abs(A).sum(axis=1).max())
        res = float(np.linalg.norm(r) / (anorm * np.linalg.norm(x) + bnorm))
    return res


def solve(system: EllipticSystem, tol=1e-10, max_iter=500, guess=None,
          preconditioner="ilu", restart=30):
    """Solve the psi system to relative residual ``tol``.

    When rounding stalls GMRES above that (condition numbers grow like 1/M^2),
    the normwise backward error ``|r| / (|A| |x| + |b|)`` is checked instead.

    1D systems are solved directly. In 2D restarted GMRES runs on the
    correction ``A d = b - A guess`` with either a diagonal (``jacobi``) or an
    incomplete-LU preconditioner. Returns ``(psi, SolveInfo)`` with ``psi``
    shaped like the interior.
    """
    A, b = system.matrix, system.rhs
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(system.shape), SolveInfo(0, 0.0, "trivial")
    x0 = np.zeros_like(b) if guess is None else np.asarray(guess, dtype=float).ravel()
    r0 = b - A @ x0

    if len(system.shape) == 1:
        x = x0 + _solve_tridiagonal(system, r0)
        info = SolveInfo(1, _accuracy(A, x, b, tol), "banded")
    else:
        r0norm = np.linalg.norm(r0)
        if r0norm <= tol * bnorm:
            return x0.reshape(system.shape), SolveInfo(0, float(r0norm / bnorm), "gmres")
        if preconditioner == "jacobi":
            inv = 1.0 / A.diagonal()
            M = spla.LinearOperator(A.shape, matvec=lambda v: inv * v)
        else:
            ilu = spla.spilu(A.tocsc(), drop_tol=1e-6, fill_factor=20)
            M = spla.LinearOperator(A.shape, matvec=ilu.solve)
        counter = {"n": 0}

        def count(_):
            counter["n"] += 1

        x, r = x0, r0
        for _ in range(4):
            # the correction's residual is the residual of b; aim for tol * ||b||
            rtol = min(0.5, 0.5 * tol * bnorm / np.linalg.norm(r))
            d, code = spla.gmres(A, r, rtol=rtol, atol=0.0, restart=restart,
                                 maxiter=max_iter, M=M, callback=count, callback_type="pr_norm")
            x = x + d
            r = b - A @ x
            res = float(np.linalg.norm(r) / bnorm)
            if res <= tol:
                break
        res = _accuracy(A, x, b, tol)
        info = SolveInfo(counter["n"], res, f"gmres+{preconditioner}")
        if code != 0 and res > tol:
            raise LinearSolverError(
                f"GMRES did not reach tol={tol:g} within {max_iter} restarts "
                f"(residual {res:.3e})", res, counter["n"])
    if not info.residual <= max(tol, 1e-13):
        raise LinearSolverError(f"residual {info.residual:.3e} above tol {tol:g}",
                                info.residual, info.iterations)
    return x.reshape(system.shape), info


def implicit_step(fld: ConservedField, relax: RelaxationField, grid: Grid, mach, a, dt,
                  closure=None, dirichlet_value=None, tol=1e-10, max_iter=500,
                  preconditioner="ilu"):
    """Return ``(RelaxationField, SolveInfo)`` with ``psi`` replaced by the solve.

    Density, momentum, energy and ``pi`` are untouched by the implicit part.
    Ghost layers of the new ``psi`` follow the grid boundary kinds.
    """
    system = assemble(fld, relax, grid, mach, a, dt, closure, dirichlet_value)
    guess = relax.psi[grid.interior]
    psi_inner, info = solve(system, tol, max_iter, guess, preconditioner)
    psi = relax.psi.copy()
    psi[grid.interior] = psi_inner
    fill_ghosts(psi, grid)
    if system.dirichlet_value is not None:
        _dirichlet_ghosts(psi, grid, system.closure, system.dirichlet_value)
    return RelaxationField(relax.pi.copy(), psi), info


def _dirichlet_ghosts(psi, grid, closure, value):
    g = NGHOST
    for axis, kind in enumerate(closure):
        if kind != "dirichlet":
            continue
        n = grid.shape[axis]
        for sl in (slice(0, g), slice(n + g, n + 2 * g)):
            idx = [slice(None)] * grid.dim
            idx[axis] = sl
            psi[tuple(idx)] = value


def dump_system(system: EllipticSystem, path) -> None:
    """Write the matrix as ``row col value`` triplets followed by the RHS."""
    coo = system.matrix.tocoo()
    with open(path, "w") as fh:
        fh.write(f"# n={system.size} nnz={coo.nnz} closure={','.join(system.closure)}\n")
        fh.write("# triplets: row col value\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {v!r}\n")
        fh.write("# rhs\n")
        for v in system.rhs:
            fh.write(f"{v!r}\n")
