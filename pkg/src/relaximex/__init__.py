"""All-speed IMEX relaxation finite-volume solver for the scaled Euler equations."""

from .cases import (CaseSpec, ReferenceScaling, custom_case, init_gresho, init_mach_shock,
                    init_smooth_gresho, init_sod, make_case)
from .config import ConfigError, parse_config, serialize
from .diagnostics import (DiagnosticsRecord, convergence_rate, convergence_rates,
                          kinetic_energy, l1_error)
from .eos import IdealGasEos, project_to_equilibrium, select_relaxation_parameter
from .exact import ExactRiemann, exact_solution
from .fileio import emit_convergence_table, read_snapshot, write_snapshot
from .implicit import LinearSolverError, assemble, implicit_step, solve
from .integrate import (RunReport, RunResult, first_order_step, imex_stage, run,
                        second_order_step, stable_time_step)
from .mesh import (AdmissibilityError, ConservedField, Grid, PrimitiveState, RelaxationField,
                   RunConfig, field_from_primitive, is_well_prepared)
from .reconstruction import face_states, minmod
from .riemann import (PositivityBreach, RiemannFan, explicit_update, interface_flux,
                      solve_riemann)

__version__ = "0.1.0"
