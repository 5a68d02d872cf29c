"""Run configuration: an INI file with sections, every key defaulted."""
from __future__ import annotations

import configparser
import re
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import sympy as sp

from .geometry import DomainSpec
from .media import MediumField, constant_medium, smooth_perturbation


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class GeometryConfig:
    outer_lower: tuple = (0.0, 0.0, 0.0)
    outer_upper: tuple = (1.0, 1.0, 1.0)
    inner_lower: tuple = (0.25, 0.25, 0.25)
    inner_upper: tuple = (0.75, 0.75, 0.75)
    n_cells: tuple = (8,)

    def domain(self, n: int) -> DomainSpec:
        return DomainSpec((self.outer_lower, self.outer_upper),
                          (self.inner_lower, self.inner_upper), n)


@dataclass
class MediumConfig:
    preset: str = "constant_scalar"   # constant_scalar | constant_spd | smooth_scalar
    eps_plus: object = 1.0
    eps_minus: object = 1.0
    mu_plus: object = 1.0
    mu_minus: object = 1.0
    amplitude: float = 0.25
    wavenumber: float = 1.0

    def build(self) -> MediumField:
        if self.preset == "constant_scalar":
            return constant_medium(*(_scalar(v) for v in (self.eps_plus, self.eps_minus,
                                                          self.mu_plus, self.mu_minus)))
        if self.preset == "constant_spd":
            return constant_medium(*(_spd(v) for v in (self.eps_plus, self.eps_minus,
                                                       self.mu_plus, self.mu_minus)))
        if self.preset == "smooth_scalar":
            return smooth_perturbation(*(complex(v).real for v in (
                self.eps_plus, self.eps_minus, self.mu_plus, self.mu_minus)),
                amplitude=self.amplitude, wavenumber=self.wavenumber)
        raise ConfigError(f"unknown medium preset {self.preset!r}")


def _scalar(v):
    c = complex(v)
    return sp.nsimplify(c.real) + sp.I * sp.nsimplify(c.imag)


def _spd(v):
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.size == 1:
        arr = np.full(3, arr.item())
    if arr.size == 3:
        arr = np.diag(arr)
    return sp.Matrix(arr.reshape(3, 3).tolist())


@dataclass
class CaseConfig:
    name: str = "plane_wave"          # plane_wave | layered | mms | zero
    omega: float = 1.0
    seed: int = 0
    direction: tuple = (0.0, 0.0, 1.0)
    polarization: tuple = (1.0, 0.0, 0.0)
    inject_beta0: float = 0.0


@dataclass
class SolverSection:
    tol: float = 1e-10
    max_iter: int = 20000
    stagnation_window: int = 2000
    surface_weight: float = 1.0
    compatibility_tol: float = 1e-10


@dataclass
class OutputConfig:
    directory: str = "out"
    vtk: bool = True
    report: str = "report.json"
    csv: str = "convergence.csv"


@dataclass
class RunConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    medium: MediumConfig = field(default_factory=MediumConfig)
    case: CaseConfig = field(default_factory=CaseConfig)
    solver: SolverSection = field(default_factory=SolverSection)
    output: OutputConfig = field(default_factory=OutputConfig)

    def as_dict(self) -> dict:
        def clean(v):
            if isinstance(v, tuple):
                return list(v)
            if isinstance(v, complex):
                return str(v)
            return v
        return {k: {kk: clean(vv) for kk, vv in sec.items()} for k, sec in asdict(self).items()}


def _parse_value(raw: str, default):
    raw = raw.strip()
    if isinstance(default, bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if isinstance(default, tuple):
        parts = [p for p in re.split(r"[,\s]+", raw) if p]
        conv = int if default and isinstance(default[0], int) else float
        return tuple(conv(p) for p in parts)
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, str):
        return raw
    # coefficients: complex scalar or comma list (spd diagonal / full matrix)
    parts = [p for p in re.split(r"[,;\s]+", raw) if p]
    vals = [complex(p.replace("i", "j")) for p in parts]
    if len(vals) == 1:
        return vals[0] if vals[0].imag else vals[0].real
    if any(v.imag for v in vals):
        raise ValueError("matrix coefficients must be real")
    return tuple(v.real for v in vals)


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", s):
            return no
    return None


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ConfigError(str(exc).splitlines()[0], line) from exc

    cfg = RunConfig()
    sections = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    entries = [(sec, key, val, _line_of(text, sec, key))
               for sec in parser.sections() for key, val in parser.items(sec)]
    for dotted, val in (overrides or {}).items():
        if "." not in dotted:
            raise ConfigError(f"override {dotted!r} must look like section.key")
        sec, key = dotted.split(".", 1)
        entries.append((sec, key, str(val), None))

    for sec, key, val, line in entries:
        if sec not in sections:
            raise ConfigError(f"unknown section [{sec}]", _line_of(text, sec, key) or line)
        target = sections[sec]
        names = {f.name for f in fields(target)}
        if key not in names:
            raise ConfigError(f"unknown key {key!r} in [{sec}]", line)
        try:
            setattr(target, key, _parse_value(val, getattr(type(target)(), key)))
        except ValueError as exc:
            raise ConfigError(f"bad value for {sec}.{key}: {exc}", line) from exc

    ncs = cfg.geometry.n_cells
    if len(ncs) == 0 or any(b <= a for a, b in zip(ncs, ncs[1:])):
        raise ConfigError("geometry.n_cells must be a strictly increasing list",
                          _line_of(text, "geometry", "n_cells"))
    if cfg.case.name not in ("plane_wave", "layered", "mms", "zero"):
        raise ConfigError(f"unknown case {cfg.case.name!r}", _line_of(text, "case", "name"))
    if not cfg.case.omega > 0:
        raise ConfigError("case.omega must be positive", _line_of(text, "case", "omega"))
    if not 0 < cfg.solver.tol < 1:
        raise ConfigError("solver.tol must lie in (0, 1)", _line_of(text, "solver", "tol"))
    return cfg


def load_config(path, overrides: dict | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    return parse_config(text, overrides)
