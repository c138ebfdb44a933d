"""Snapshot files (CSV and legacy ASCII VTK) and convergence tables."""

from __future__ import annotations

import io
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional

import numpy as np

from .diagnostics import convergence_rate, primitive_arrays
from .mesh import ConservedField, Grid

TABLE_COLUMNS = ("M", "N", "err_rho", "rate_rho", "err_u1", "rate_u1", "err_u2", "rate_u2",
                 "err_p", "rate_p")


def snapshot_columns(fld: ConservedField, grid: Grid, mach, gamma, scaling=None
                     ) -> "OrderedDict[str, np.ndarray]":
    """Flattened (C order over ``[i, j]``) columns of a snapshot.

    ``mach_local = M |u| / c`` is the local Mach number. With ``scaling`` every
    other column is converted to dimensional units.
    """
    prim = primitive_arrays(fld, grid, mach, gamma)
    cols = OrderedDict()
    coords = grid.mesh()
    cols["x"] = coords[0]
    if grid.dim == 2:
        cols["y"] = coords[1]
    cols["rho"] = prim["rho"]
    cols["u"] = prim["u1"]
    if grid.dim == 2:
        cols["v"] = prim["u2"]
    cols["p"] = prim["p"]
    cols["e"] = prim["e"]
    speed = np.sqrt(prim["u1"] ** 2 + (prim["u2"] ** 2 if grid.dim == 2 else 0.0))
    cols["mach_local"] = mach * speed / np.sqrt(gamma * prim["p"] / prim["rho"])
    if scaling is not None:
        for k in cols:
            cols[k] = cols[k] * scaling.unit(k)
    return OrderedDict((k, np.ravel(v)) for k, v in cols.items())


def _write_text(path, text):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def csv_text(columns: Mapping[str, np.ndarray]) -> str:
    buf = io.StringIO()
    data = np.column_stack(list(columns.values()))
    np.savetxt(buf, data, fmt="%.17g", delimiter=",", header=",".join(columns), comments="")
    return buf.getvalue()


def vtk_text(columns: Mapping[str, np.ndarray], grid: Grid, time=0.0, scaling=None) -> str:
    """Legacy ASCII STRUCTURED_POINTS file with one point per cell centre."""
    nx = grid.nx
    ny = grid.ny if grid.dim == 2 else 1
    unit = 1.0 if scaling is None else scaling.unit("x")
    h = [s * unit for s in grid.spacing] + [0.0] * (2 - grid.dim)
    origin = [float(grid.centers(k)[0]) * unit for k in range(grid.dim)] + [0.0] * (2 - grid.dim)
    lines = ["# vtk DataFile Version 3.0", f"relaximex snapshot t={time!r}", "ASCII",
             "DATASET STRUCTURED_POINTS", f"DIMENSIONS {nx} {ny} 1",
             f"ORIGIN {origin[0]!r} {origin[1]!r} 0", f"SPACING {h[0] or 1.0!r} {h[1] or 1.0!r} 1",
             f"POINT_DATA {nx * ny}"]
    for name, values in columns.items():
        if name in ("x", "y"):
            continue
        # VTK runs x fastest; our flattening runs y fastest
        arr = np.asarray(values).reshape(grid.shape)
        ordered = arr.T.ravel() if grid.dim == 2 else arr
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += ["%.17g" % v for v in ordered]
    return "\n".join(lines) + "\n"


def write_snapshot(fld: ConservedField, grid: Grid, mach, gamma, time, path, fmt="csv",
                   scaling=None, relax=None) -> Path:
    """Write a snapshot; output bytes depend only on the inputs.

    ``relax`` is accepted for interface symmetry: snapshots store equilibrium
    data, where pi and psi both equal p.
    """
    cols = snapshot_columns(fld, grid, mach, gamma, scaling)
    if fmt == "csv":
        return _write_text(path, csv_text(cols))
    if fmt == "vtk":
        t = time * (scaling.t_r if scaling is not None else 1.0)
        return _write_text(path, vtk_text(cols, grid, t, scaling))
    raise ValueError(f"unknown snapshot format {fmt!r}")


def read_snapshot(path) -> "OrderedDict[str, np.ndarray]":
    """Columns of a CSV snapshot keyed by header name."""
    try:
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    if data.size == 0:
        data = np.zeros((0, len(header)))
    if data.shape[1] != len(header):
        raise ValueError(f"{path}: {data.shape[1]} columns for {len(header)} header names")
    return OrderedDict((name, data[:, k].copy()) for k, name in enumerate(header))


def parse_vtk(text: str) -> Dict[str, object]:
    """Minimal legacy STRUCTURED_POINTS reader; raises ValueError on malformed files."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# vtk DataFile Version"):
        raise ValueError("missing VTK version line")
    if lines[2].strip() != "ASCII":
        raise ValueError("only ASCII files are supported")
    if lines[3].split() != ["DATASET", "STRUCTURED_POINTS"]:
        raise ValueError("dataset is not STRUCTURED_POINTS")
    meta = {}
    k = 4
    while k < len(lines) and not lines[k].startswith("POINT_DATA"):
        parts = lines[k].split()
        meta[parts[0]] = [float(p) for p in parts[1:]]
        k += 1
    for key in ("DIMENSIONS", "ORIGIN", "SPACING"):
        if key not in meta or len(meta[key]) != 3:
            raise ValueError(f"missing or malformed {key}")
    npts = int(lines[k].split()[1])
    if npts != int(np.prod(meta["DIMENSIONS"])):
        raise ValueError("POINT_DATA count does not match DIMENSIONS")
    k += 1
    fields = {}
    while k < len(lines):
        head = lines[k].split()
        if head[0] != "SCALARS" or lines[k + 1].split()[0] != "LOOKUP_TABLE":
            raise ValueError(f"unexpected line {lines[k]!r}")
        values = np.array([float(v) for v in lines[k + 2:k + 2 + npts]])
        if values.size != npts:
            raise ValueError(f"scalar {head[1]} has {values.size} values, expected {npts}")
        fields[head[1]] = values
        k += 2 + npts
    return {"meta": meta, "fields": fields}


def emit_convergence_table(results: Iterable[Mapping], path=None) -> str:
    """CSV table of L1 errors and observed orders grouped by Mach number.

    Each result maps ``M``, ``N`` and ``errors`` (a dict with rho, u1, u2, p;
    u2 may be absent in 1D). Rates compare each level with the next coarser one.
    """
    results = list(results)
    if not results:
        raise ValueError("no convergence results to tabulate")
    groups: "OrderedDict[float, list]" = OrderedDict()
    for res in results:
        groups.setdefault(float(res["M"]), []).append(res)
    rows = [",".join(TABLE_COLUMNS)]
    for mach, group in groups.items():
        if len(group) < 2:
            raise ValueError(f"need at least two resolutions for M={mach:g}")
        group = sorted(group, key=lambda r: r["N"])
        prev = None
        for res in group:
            cells = [repr(mach), str(int(res["N"]))]
            for var in ("rho", "u1", "u2", "p"):
                err = res["errors"].get(var)
                if err is None:
                    cells += ["", ""]
                    continue
                rate = ""
                if prev is not None and prev["errors"].get(var) is not None:
                    r = convergence_rate(prev["N"], prev["errors"][var], res["N"], err)
                    rate = "" if np.isnan(r) else "%.4f" % r
                cells += ["%.6e" % err, rate]
            rows.append(",".join(cells))
            prev = res
    text = "\n".join(rows) + "\n"
    if path is not None:
        _write_text(path, text)
    return text
