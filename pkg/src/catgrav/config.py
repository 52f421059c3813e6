"""Experiment configuration: a flat TOML file with SI-unit keys.

Every key names a field of :class:`MechanicalParams`, :class:`GasParams`,
:class:`BaselineParams` or of the run options below; field names are unique
across the three, so no prefixes are needed.  Tables (``[params]``,
``[gas]``, ...) are accepted and simply flattened.

    m = 1e-9
    omega = 62831.853071795864
    pressure = 1e-5
    sweep_variable = "m"
    sweep_min = 1e-12
    sweep_max = 1e-8
    sweep_points = 9
    sweep_scale = "log"
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
import math
from pathlib import Path
import sys
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .baselines import BaselineParams
from .environment import GasParams
from .errors import ConfigError
from .model import MechanicalParams


@dataclass(frozen=True)
class SweepAxis:
    variable: str
    lo: float
    hi: float
    points: int
    scale: str = "linear"

    def __post_init__(self):
        if self.variable not in _names(MechanicalParams):
            raise ConfigError(f"sweep_variable {self.variable!r} is not a MechanicalParams field")
        if self.points < 2:
            raise ConfigError("sweep_points must be >= 2")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"sweep_scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and not (self.lo > 0 and self.hi > 0):
            raise ConfigError("log sweeps need positive bounds")

    def values(self):
        if self.scale == "log":
            return np.logspace(math.log10(self.lo), math.log10(self.hi), self.points)
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class ExperimentConfig:
    params: MechanicalParams = field(default_factory=MechanicalParams)
    gas: Optional[GasParams] = None
    baseline: Optional[BaselineParams] = None
    sweep: Optional[SweepAxis] = None
    tol: float = 1e-10
    out: Optional[str] = None
    jobs: Optional[int] = None
    dim: Optional[int] = None
    deterministic: bool = True

    def to_dict(self):
        return {
            "params": self.params.to_dict(),
            "gas": None if self.gas is None else dict(self.gas.__dict__),
            "baseline": None if self.baseline is None else dict(self.baseline.__dict__),
            "sweep": None if self.sweep is None else dict(self.sweep.__dict__),
            "tol": self.tol,
            "dim": self.dim,
            "deterministic": True,
        }


RUN_KEYS = {"tol", "out", "jobs", "dim"}
SWEEP_KEYS = {"sweep_variable", "sweep_min", "sweep_max", "sweep_points", "sweep_scale"}


def _names(cls):
    return {f.name for f in fields(cls)}


def _flatten(data):
    flat = {}
    for key, value in data.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                name = f"sweep_{sub}" if key == "sweep" and not sub.startswith("sweep_") else sub
                if name in flat:
                    raise ConfigError(f"duplicate key {name!r}")
                flat[name] = v
        else:
            if key in flat:
                raise ConfigError(f"duplicate key {key!r}")
            flat[key] = value
    return flat


def _number(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def from_mapping(data):
    """Build an :class:`ExperimentConfig` from a (possibly nested) mapping."""
    flat = _flatten(data)
    pnames, gnames, bnames = _names(MechanicalParams), _names(GasParams), _names(BaselineParams)
    known = pnames | gnames | bnames | RUN_KEYS | SWEEP_KEYS
    unknown = sorted(set(flat) - known)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    params = MechanicalParams(**{k: _number(k, v) for k, v in flat.items() if k in pnames})
    gas_vals = {k: _number(k, v) for k, v in flat.items() if k in gnames}
    gas = GasParams(**gas_vals) if gas_vals else None
    base_vals = {k: _number(k, v) for k, v in flat.items() if k in bnames}
    baseline = BaselineParams(**base_vals) if base_vals else None

    sweep = None
    present = SWEEP_KEYS & set(flat)
    if present:
        missing = sorted(SWEEP_KEYS - present - {"sweep_scale"})
        if missing:
            raise ConfigError(f"missing config field(s): {', '.join(missing)}")
        points = flat["sweep_points"]
        if isinstance(points, bool) or not isinstance(points, int):
            raise ConfigError("sweep_points must be an integer")
        sweep = SweepAxis(str(flat["sweep_variable"]), _number("sweep_min", flat["sweep_min"]),
                          _number("sweep_max", flat["sweep_max"]), points,
                          str(flat.get("sweep_scale", "linear")))

    tol = _number("tol", flat.get("tol", 1e-10))
    jobs = flat.get("jobs")
    if jobs is not None and (isinstance(jobs, bool) or not isinstance(jobs, int) or jobs < 1):
        raise ConfigError("jobs must be a positive integer")
    dim = flat.get("dim")
    if dim is not None and (isinstance(dim, bool) or not isinstance(dim, int) or dim < 2):
        raise ConfigError("dim must be an integer >= 2")
    out = flat.get("out")
    return ExperimentConfig(params, gas, baseline, sweep, tol,
                            None if out is None else str(out), jobs, dim)


def load_config(path):
    """Read a TOML config file; ``None`` gives the reference operating point."""
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return from_mapping(data)
