"""Plain-text run configuration: ``key = value`` lines, CLI overrides, validation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from .cases import CaseSpec, make_case
from .mesh import BOUNDARY_KINDS, RunConfig


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = f"line {line}: " if line is not None else ""
        what = f"key '{key}': " if key is not None else ""
        super().__init__(f"{where}{what}{message}")
        self.key = key
        self.line = line


def _bool(text):
    low = text.strip().lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _boundary(text):
    kinds = tuple(k.strip() for k in text.split(",") if k.strip())
    if not kinds or any(k not in BOUNDARY_KINDS for k in kinds):
        raise ValueError(f"expected {' or '.join(BOUNDARY_KINDS)} (comma separated per axis), "
                         f"got {text!r}")
    return kinds


def _choice(*options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    return parse


# canonical key order and value parsers
KEYS = {
    "case": _choice("sod", "mach_shock", "gresho", "smooth_gresho"),
    "mach": float,
    "gamma": float,
    "nx": int,
    "ny": int,
    "cfl": float,
    "order": int,
    "t_end": float,
    "a_safety": float,
    "stability_floor": _bool,
    "boundary": _boundary,
    "lin_tol": float,
    "lin_maxiter": int,
    "preconditioner": _choice("ilu", "jacobi"),
    "vortex_scaling": _choice("sound_speed", "gamma_reduced"),
    "output_dir": str,
    "output_every": int,
    "format": _choice("csv", "vtk"),
    "variable_stage_steps": _bool,
    "max_steps": int,
}


@dataclass
class RunSetup:
    """A validated configuration: numerical parameters, case and grid size."""

    config: RunConfig
    case: CaseSpec
    nx: int
    ny: int
    values: Dict[str, object]

    def grid(self):
        return self.case.make_grid(self.nx, self.ny or None)

    def initial_field(self):
        return self.case.initial_field(self.grid())


def _tokens_from_text(text: str) -> List[Tuple[str, str, int]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        out.append((key, value, lineno))
    return out


def _tokens_from_pairs(pairs: Iterable[str]) -> List[Tuple[str, str, Optional[int]]]:
    out = []
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"expected key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        out.append((key, value, None))
    return out


def _typed(tokens) -> Tuple[Dict[str, object], Dict[str, Optional[int]]]:
    values, lines = {}, {}
    for key, value, line in tokens:
        if key not in KEYS:
            raise ConfigError(f"unknown key (known: {', '.join(KEYS)})", key, line)
        try:
            values[key] = KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(str(exc) if "expected" in str(exc) else f"invalid value {value!r}",
                              key, line) from None
        lines[key] = line
    return values, lines


def parse_config(path=None, overrides: Iterable[str] = (), text: Optional[str] = None) -> RunSetup:
    """Read a config file (or ``text``) and apply ``key=value`` overrides on top."""
    tokens = []
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    if text is not None:
        tokens += _tokens_from_text(text)
    tokens += _tokens_from_pairs(overrides)
    values, lines = _typed(tokens)
    return build_setup(values, lines)


def build_setup(values: Dict[str, object], lines=None) -> RunSetup:
    lines = lines or {}
    values = dict(values)
    name = values.setdefault("case", "sod")
    mach = values.get("mach")
    if mach is not None and not mach > 0:
        raise ConfigError(f"must be positive, got {mach}", "mach", lines.get("mach"))
    try:
        extra = {"scaling": values["vortex_scaling"]} if "vortex_scaling" in values else {}
        if "vortex_scaling" in values and name not in ("gresho", "smooth_gresho"):
            raise ConfigError("only applies to the vortex cases", "vortex_scaling",
                              lines.get("vortex_scaling"))
        case = make_case(name, mach=mach, gamma=values.get("gamma"), **extra)
    except ConfigError:
        raise
    except ValueError as exc:
        key = "mach" if "mach" in str(exc) else "case"
        raise ConfigError(str(exc), key, lines.get(key)) from None
    if "t_end" in values:
        case = case.with_options(t_end=values["t_end"])
    if "boundary" in values:
        bc = values["boundary"]
        if len(bc) == 1:
            bc = bc * case.dim
        if len(bc) != case.dim:
            raise ConfigError(f"expected {case.dim} boundary kind(s)", "boundary",
                              lines.get("boundary"))
        case = case.with_options(boundary=bc)

    nx = values.get("nx", case.default_n)
    ny = values.get("ny", nx if case.dim == 2 else 0)
    if case.dim == 1 and ny:
        raise ConfigError("one-dimensional case takes no ny", "ny", lines.get("ny"))
    for key, n in (("nx", nx), ("ny", ny)):
        if (key == "nx" or case.dim == 2) and n < 3:
            raise ConfigError(f"need at least 3 cells, got {n}", key, lines.get(key))

    kw = {k: values[k] for k in ("cfl", "order", "a_safety", "stability_floor", "lin_tol", "lin_maxiter",
                                 "preconditioner", "output_dir", "output_every", "format",
                                 "variable_stage_steps", "max_steps") if k in values}
    cfg = RunConfig(mach=case.mach, gamma=case.gamma, t_end=case.t_end, **kw)
    try:
        cfg = cfg.resolved(case.dim)
    except ValueError as exc:
        key = str(exc).split()[0]
        raise ConfigError(str(exc), key, lines.get(key)) from None
    if cfg.output_every < 0:
        raise ConfigError("must be non-negative", "output_every", lines.get("output_every"))
    values.update(nx=nx, t_end=case.t_end, cfl=cfg.cfl, order=cfg.order)
    if case.dim == 2:
        values["ny"] = ny
    return RunSetup(cfg, case, nx, ny, values)


def serialize(setup: RunSetup) -> str:
    """Canonical text form; parsing it reproduces ``setup``."""
    v = dict(setup.values)
    cfg = setup.config
    v.update(gamma=cfg.gamma, a_safety=cfg.a_safety, stability_floor=cfg.stability_floor,
             lin_tol=cfg.lin_tol,
             lin_maxiter=cfg.lin_maxiter, preconditioner=cfg.preconditioner,
             output_every=cfg.output_every, format=cfg.format,
             variable_stage_steps=cfg.variable_stage_steps, max_steps=cfg.max_steps,
             boundary=setup.case.boundary)
    if "mach" not in v:
        v["mach"] = setup.case.params.get("nominal_mach", setup.case.mach)
    if cfg.output_dir is not None:
        v["output_dir"] = cfg.output_dir
    lines = []
    for key in KEYS:
        if key not in v:
            continue
        val = v[key]
        if isinstance(val, bool):
            text = "true" if val else "false"
        elif isinstance(val, tuple):
            text = ",".join(val)
        elif isinstance(val, float):
            text = repr(val)
        else:
            text = str(val)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
