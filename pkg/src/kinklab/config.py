"""Experiment configuration in a flat sectioned key-value format."""

from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, field, fields

import numpy as np

SCENARIOS = ("verify-identities", "stationary-kink", "boosted-kink")
FAMILIES = ("gaussian-bump", "odd-bump", "dft-band")
INTEGRATORS = ("rk4", "strang")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class GridSection:
    L: float = 640.0
    N: int = 8192


@dataclass(frozen=True)
class SolverSection:
    T: float = 200.0
    dt: float = 0.0  # 0 selects dt_factor * h
    dt_factor: float = 0.25
    integrator: str = "rk4"
    sponge: bool = False
    sponge_strength: float = 1.0
    sponge_fraction: float = 0.1
    monitor_every: float = 1.0


@dataclass(frozen=True)
class PhysicsSection:
    ell0: float = 0.2
    x0: float = 0.0
    family: str = "gaussian-bump"
    amplitude: float = 0.05
    width: float = 1.0
    center: float = 1.0
    band_lo: float = 0.5
    band_hi: float = 2.5


@dataclass(frozen=True)
class DiagnosticsSection:
    decay: bool = True
    phase: bool = True
    window_start: float = 20.0
    window_end: float = 200.0
    conservation_until: float = 100.0
    conservation_tol: float = 1e-8
    band_lo: float = 0.3
    band_hi: float = 3.0


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str = "boosted-kink"
    seed: int = 0
    out: str = "runs/out"
    grid: GridSection = field(default_factory=GridSection)
    solver: SolverSection = field(default_factory=SolverSection)
    physics: PhysicsSection = field(default_factory=PhysicsSection)
    diagnostics: DiagnosticsSection = field(default_factory=DiagnosticsSection)

    def validate(self) -> "ExperimentConfig":
        """Check every field against the preconditions of the modules it feeds."""
        if self.scenario not in SCENARIOS:
            raise ConfigError("run.scenario", f"must be one of {SCENARIOS}")
        if self.seed < 0:
            raise ConfigError("run.seed", "must be non-negative")
        g = self.grid
        if not (np.isfinite(g.L) and g.L > 0):
            raise ConfigError("grid.L", "must be positive")
        if g.N < 16 or g.N & (g.N - 1):
            raise ConfigError("grid.N", "must be a power of two, at least 16")
        s = self.solver
        if not s.T >= 0:
            raise ConfigError("solver.T", "must be non-negative")
        if s.dt < 0:
            raise ConfigError("solver.dt", "must be non-negative")
        if not 0 < s.dt_factor <= 0.5:
            raise ConfigError("solver.dt_factor", "must lie in (0, 0.5]")
        if s.integrator not in INTEGRATORS:
            raise ConfigError("solver.integrator", f"must be one of {INTEGRATORS}")
        if not 0 < s.sponge_fraction < 0.5:
            raise ConfigError("solver.sponge_fraction", "must lie in (0, 0.5)")
        if s.sponge_strength < 0:
            raise ConfigError("solver.sponge_strength", "must be non-negative")
        if not s.monitor_every > 0:
            raise ConfigError("solver.monitor_every", "must be positive")
        p = self.physics
        if not abs(p.ell0) < 1:
            raise ConfigError("physics.ell0", "must lie in (-1, 1)")
        if self.scenario == "stationary-kink" and p.ell0 != 0:
            raise ConfigError("physics.ell0", "stationary-kink requires ell0 = 0")
        if p.family not in FAMILIES:
            raise ConfigError("physics.family", f"must be one of {FAMILIES}")
        if p.amplitude < 0:
            raise ConfigError("physics.amplitude", "must be non-negative")
        if not p.width > 0:
            raise ConfigError("physics.width", "must be positive")
        if not p.band_lo < p.band_hi:
            raise ConfigError("physics.band_hi", "must exceed band_lo")
        if abs(p.x0) >= g.L / 4 or abs(p.center - p.x0) >= g.L / 4:
            raise ConfigError("physics.x0", "kink and bump must sit in the inner half of the box")
        d = self.diagnostics
        if not 0 < d.window_start < d.window_end:
            raise ConfigError("diagnostics.window_end", "window must satisfy 0 < start < end")
        if not d.band_lo < d.band_hi:
            raise ConfigError("diagnostics.band_hi", "must exceed band_lo")
        if not d.conservation_tol > 0:
            raise ConfigError("diagnostics.conservation_tol", "must be positive")
        return self

    def replace(self, **dotted) -> "ExperimentConfig":
        """Copy with dotted overrides such as ``{'physics.ell0': 0.3}``."""
        data = self.to_dict()
        for key, value in dotted.items():
            section, _, name = key.rpartition(".")
            target = data[section] if section and section != "run" else data
            if name not in target:
                raise ConfigError(key, "unknown field")
            target[name] = value
        return ExperimentConfig.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        sections = {"grid": GridSection, "solver": SolverSection,
                    "physics": PhysicsSection, "diagnostics": DiagnosticsSection}
        kw = {}
        for f in fields(cls):
            if f.name in sections:
                sub = sections[f.name]
                raw = data.get(f.name, {})
                unknown = set(raw) - {g.name for g in fields(sub)}
                if unknown:
                    raise ConfigError(f"{f.name}.{sorted(unknown)[0]}", "unknown field")
                kw[f.name] = sub(**{g.name: _coerce(f"{f.name}.{g.name}", g.type, raw[g.name])
                                    for g in fields(sub) if g.name in raw})
            elif f.name in data:
                kw[f.name] = _coerce(f"run.{f.name}", f.type, data[f.name])
        return cls(**kw)


def _coerce(name, typ, value):
    typ = typ if isinstance(typ, str) else typ.__name__
    try:
        if typ == "bool":
            if isinstance(value, str):
                v = value.strip().lower()
                if v in ("true", "yes", "1", "on"):
                    return True
                if v in ("false", "no", "0", "off"):
                    return False
                raise ValueError(value)
            return bool(value)
        if typ == "int":
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if typ == "float":
            return float(value)
        return str(value).strip()
    except (TypeError, ValueError):
        raise ConfigError(name, f"cannot read {value!r} as {typ}") from None


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dumps(cfg: ExperimentConfig) -> str:
    """Serialize to the sectioned text format."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    d = cfg.to_dict()
    cp["run"] = {k: _fmt(d[k]) for k in ("scenario", "seed", "out")}
    for sec in ("grid", "solver", "physics", "diagnostics"):
        cp[sec] = {k: _fmt(v) for k, v in d[sec].items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def loads(text: str) -> ExperimentConfig:
    """Parse the sectioned text format; missing keys take their defaults."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("file", str(exc).splitlines()[0]) from None
    data = {}
    for sec in cp.sections():
        if sec == "run":
            data.update(dict(cp[sec]))
        elif sec in ("grid", "solver", "physics", "diagnostics"):
            data[sec] = dict(cp[sec])
        else:
            raise ConfigError(sec, "unknown section")
    unknown = set(data) - {"scenario", "seed", "out", "grid", "solver", "physics", "diagnostics"}
    if unknown:
        raise ConfigError(f"run.{sorted(unknown)[0]}", "unknown field")
    return ExperimentConfig.from_dict(data)


def load(path) -> ExperimentConfig:
    with open(path) as fh:
        return loads(fh.read())


def save(cfg: ExperimentConfig, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(cfg))


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian parameter grid, or a convergence study with ``levels`` refinements."""

    mode: str = "grid"
    params: dict = field(default_factory=dict)
    levels: int = 3

    @property
    def points(self) -> list:
        if self.mode == "convergence":
            return [{"level": k} for k in range(self.levels)]
        if not self.params:
            return []
        keys = sorted(self.params)
        grids = np.meshgrid(*[np.arange(len(self.params[k])) for k in keys], indexing="ij")
        idx = np.stack([g.ravel() for g in grids], axis=1)
        return [{k: self.params[k][i] for k, i in zip(keys, row)} for row in idx]


def loads_sweep(text: str) -> SweepSpec:
    """Parse a ``[sweep]`` section: ``mode``, ``levels`` and dotted keys with comma lists."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    if "sweep" not in cp:
        raise ConfigError("sweep", "missing [sweep] section")
    sec = dict(cp["sweep"])
    mode = sec.pop("mode", "grid").strip()
    if mode not in ("grid", "convergence"):
        raise ConfigError("sweep.mode", "must be 'grid' or 'convergence'")
    levels = int(sec.pop("levels", 3))
    if levels < 2 and mode == "convergence":
        raise ConfigError("sweep.levels", "a convergence study needs at least two levels")
    params = {}
    for k, v in sec.items():
        if "." not in k:
            raise ConfigError(f"sweep.{k}", "parameter keys are dotted, e.g. physics.ell0")
        items = [s.strip() for s in v.split(",") if s.strip()]
        params[k] = items
    return SweepSpec(mode, params, levels)


def load_sweep(path) -> SweepSpec:
    with open(path) as fh:
        return loads_sweep(fh.read())
