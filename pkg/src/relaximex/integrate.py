"""Time stepping: IMEX relaxation stages, the two-stage second-order combination,
and the driver loop with its run report."""

from __future__ import annotations

import json
import time as _time
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .diagnostics import DiagnosticsRecord
from .eos import project_to_equilibrium, select_relaxation_parameter, step_floor
from .implicit import implicit_step
from .mesh import ConservedField, Grid, RunConfig, check_admissible
from .riemann import PositivityBreach, explicit_update, max_signal_speed

# retries of a stage with a doubled relaxation parameter after a star-state breach
MAX_A_DOUBLINGS = 6


class StallError(RuntimeError):
    """The time step collapsed before reaching the final time."""


@dataclass
class StageInfo:
    a: float
    dt: float
    iterations: int
    residual: float


@dataclass
class StepResult:
    field: ConservedField
    dt: float
    stages: List[StageInfo]


def stage_parameter(fld: ConservedField, grid: Grid, cfg: RunConfig, dt=None) -> float:
    """Relaxation parameter of a stage; with the stability floor on, a stage
    step ``dt`` shorter than the CFL step raises ``a`` further."""
    if not cfg.stability_floor:
        return select_relaxation_parameter(fld, grid, cfg.gamma, cfg.a_safety, cfg.mach)
    a = select_relaxation_parameter(fld, grid, cfg.gamma, cfg.a_safety, cfg.mach, cfg.cfl)
    if dt is not None:
        a = max(a, step_floor(fld, grid, cfg.gamma, cfg.mach, dt))
    return a


def stable_time_step(fld: ConservedField, grid: Grid, cfg: RunConfig, a=None) -> float:
    """CFL step ``cfl * min(h) / max|u -+ a/rho|``; carries no Mach number."""
    if a is None:
        a = stage_parameter(fld, grid, cfg)
    return cfg.cfl * min(grid.spacing) / max_signal_speed(fld, grid, a)


def imex_stage(fld: ConservedField, grid: Grid, cfg: RunConfig, dt, order=None):
    """One relaxation stage from equilibrium data: implicit psi, explicit update.

    Returns ``(new_field, StageInfo)``. The output is again read as equilibrium
    data by the next stage, which projects pi = psi = p.
    """
    order = cfg.order if order is None else order
    fld = fld.copy().fill_ghosts(grid)
    relax = project_to_equilibrium(fld, cfg.mach, cfg.gamma)
    a = stage_parameter(fld, grid, cfg, dt)
    for attempt in range(MAX_A_DOUBLINGS + 1):
        psi, info = implicit_step(fld, relax, grid, cfg.mach, a, dt, tol=cfg.lin_tol,
                                  max_iter=cfg.lin_maxiter, preconditioner=cfg.preconditioner)
        try:
            new = explicit_update(fld, psi, grid, a, cfg.mach, cfg.gamma, dt, order)
        except PositivityBreach as exc:
            # ill-prepared jumps can need a larger a than the sound speed bound
            if exc.kind != "star" or attempt == MAX_A_DOUBLINGS:
                raise
            a *= 2.0
            continue
        return new, StageInfo(a, dt, info.iterations, info.residual)


def first_order_step(fld: ConservedField, grid: Grid, cfg: RunConfig, dt=None) -> StepResult:
    if dt is None:
        dt = stable_time_step(fld, grid, cfg)
    new, info = imex_stage(fld, grid, cfg, dt, order=1)
    return StepResult(new, dt, [info])


def stage_weight(dt1, dt2):
    """Weight of the second stage in ``(1 - theta) w^n + theta w2`` and the step length.

    ``theta = 2 dt1 dt2 / (dt1 + dt2)^2`` makes the combination second-order
    accurate over ``h = 2 dt1 dt2 / (dt1 + dt2)``; equal steps give 1/2 and dt.
    """
    s = dt1 + dt2
    return 2.0 * dt1 * dt2 / s**2, 2.0 * dt1 * dt2 / s


def second_order_step(fld: ConservedField, grid: Grid, cfg: RunConfig, dt=None,
                      variable=None) -> StepResult:
    """Two IMEX stages with linear reconstruction, combined convexly.

    With ``variable`` (default ``cfg.variable_stage_steps``) the second stage
    uses the CFL step of the intermediate state; otherwise both stages use dt.
    """
    variable = cfg.variable_stage_steps if variable is None else variable
    if dt is None:
        dt = stable_time_step(fld, grid, cfg)
    w1, s1 = imex_stage(fld, grid, cfg, dt, order=2)
    dt2 = stable_time_step(w1, grid, cfg) if variable else dt
    w2, s2 = imex_stage(w1, grid, cfg, dt2, order=2)
    theta, h = stage_weight(dt, dt2)
    out = ConservedField((1.0 - theta) * fld.data + theta * w2.data).fill_ghosts(grid)
    check_admissible(out, grid, cfg.mach)
    return StepResult(out, h, [s1, s2])


@dataclass
class RunReport:
    steps: int = 0
    t_final: float = 0.0
    mach: float = 1.0
    order: int = 1
    cfl: float = 0.0
    dt_min: float = float("inf")
    dt_max: float = 0.0
    a_min: float = float("inf")
    a_max: float = 0.0
    linear_iterations_total: int = 0
    linear_iterations_max: int = 0
    linear_residual_max: float = 0.0
    admissible: bool = True
    mass_drift: float = 0.0
    energy_drift: float = 0.0
    wallclock_seconds: float = 0.0
    experimental: bool = False

    def to_text(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass
class RunResult:
    field: ConservedField
    time: float
    report: RunReport
    diagnostics: DiagnosticsRecord
    dts: List[float] = field(default_factory=list)


def run(fld: ConservedField, grid: Grid, cfg: RunConfig, t_end=None,
        on_output: Optional[Callable[[int, float, ConservedField], None]] = None,
        fixed_dt=None) -> RunResult:
    """Advance ``fld`` to ``t_end`` (default ``cfg.t_end``).

    The last step is shortened to land on ``t_end`` exactly. ``on_output`` is
    called with ``(step, t, field)`` at the start, every ``cfg.output_every``
    steps and at the end. ``fixed_dt`` overrides the CFL step (clipped to the
    remaining time).
    """
    cfg = cfg.resolved(grid.dim)
    t_end = cfg.t_end if t_end is None else float(t_end)
    fld = fld.copy().fill_ghosts(grid)
    check_admissible(fld, grid, cfg.mach)
    report = RunReport(mach=cfg.mach, order=cfg.order, cfl=cfg.cfl, experimental=cfg.experimental)
    diag = DiagnosticsRecord(grid, cfg.mach, cfg.gamma)
    diag.record(0.0, fld)
    totals0 = diag.totals[0]
    if on_output:
        on_output(0, 0.0, fld)
    step_fn = first_order_step if cfg.order == 1 else second_order_step
    start = _time.perf_counter()
    t = 0.0
    dts = []
    while t < t_end and report.steps < cfg.max_steps:
        remaining = t_end - t
        dt = fixed_dt if fixed_dt is not None else stable_time_step(fld, grid, cfg)
        if dt <= 1e-14 * max(t_end, 1e-300):
            raise StallError(f"time step {dt:.3e} collapsed at t={t:.6g}")
        last = dt >= remaining
        if last:
            dt = remaining
        if cfg.order == 2:
            res = second_order_step(fld, grid, cfg, dt, variable=cfg.variable_stage_steps and not last)
            if res.dt > remaining:
                res = second_order_step(fld, grid, cfg, remaining, variable=False)
                last = True
        else:
            res = step_fn(fld, grid, cfg, dt)
        fld = res.field
        t = t_end if last else t + res.dt
        report.steps += 1
        dts.append(res.dt)
        report.dt_min = min(report.dt_min, res.dt)
        report.dt_max = max(report.dt_max, res.dt)
        for st in res.stages:
            report.a_min = min(report.a_min, st.a)
            report.a_max = max(report.a_max, st.a)
            report.linear_iterations_total += st.iterations
            report.linear_iterations_max = max(report.linear_iterations_max, st.iterations)
            report.linear_residual_max = max(report.linear_residual_max, st.residual)
        diag.record(t, fld)
        if on_output and cfg.output_every and report.steps % cfg.output_every == 0 and t < t_end:
            on_output(report.steps, t, fld)
    if on_output:
        on_output(report.steps, t, fld)
    report.wallclock_seconds = _time.perf_counter() - start
    report.t_final = t
    totals = diag.totals[-1]
    report.mass_drift = float(abs(totals[0] - totals0[0]) / abs(totals0[0]))
    report.energy_drift = float(abs(totals[-1] - totals0[-1]) / abs(totals0[-1]))
    return RunResult(fld, t, report, diag, dts)
