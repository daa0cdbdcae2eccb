"""Scan configuration: JSON file plus command-line overrides."""

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np

from .errors import ConfigError

FIG2_NBAR = (1e-2, 1.0, 10.0, 100.0, 1e4)


@dataclass(frozen=True)
class FringeSettings:
    nbar1: float = 1.0
    t: float = 0.5
    phi_steps: int = 73
    balance: bool = True


@dataclass(frozen=True)
class ScanConfig:
    t_start: float = 0.0
    t_stop: float = 1.0
    t_steps: int = 101
    nbar: tuple = FIG2_NBAR
    out: Optional[str] = None
    svg: Optional[str] = None
    verify: bool = False
    fringe: Optional[str] = None
    fringe_settings: FringeSettings = field(default_factory=FringeSettings)
    # cross-route agreement for scan rows
    tol: float = 1e-12
    # oracle settings
    oracle_tol: float = 1e-10
    agreement_floor: float = 1e-8
    cutoff_cap: int = 24
    chi_max: float = 0.75
    # fringe identity V_balanced = g1
    fringe_tol: float = 1e-9
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "nbar", tuple(float(n) for n in self.nbar))
        self.validate()

    def validate(self):
        if int(self.t_steps) != self.t_steps or self.t_steps < 2:
            raise ConfigError("t_steps", f"grid count must be an integer >= 2, got {self.t_steps}")
        for name in ("t_start", "t_stop"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigError(name, f"must lie in [0, 1], got {v}")
        if self.t_start >= self.t_stop:
            raise ConfigError("t_start", f"must be below t_stop ({self.t_start} >= {self.t_stop})")
        if not self.nbar:
            raise ConfigError("nbar", "need at least one nbar1 value")
        for n in self.nbar:
            if not (math.isfinite(n) and n >= 0):
                raise ConfigError("nbar", f"entries must be finite and >= 0, got {n}")
        for name in ("tol", "oracle_tol", "agreement_floor", "fringe_tol", "chi_max"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(name, f"must be a positive number, got {v!r}")
        if int(self.cutoff_cap) != self.cutoff_cap or self.cutoff_cap < 1:
            raise ConfigError("cutoff_cap", f"must be an integer >= 1, got {self.cutoff_cap}")
        if int(self.jobs) != self.jobs or self.jobs < 1:
            raise ConfigError("jobs", f"must be an integer >= 1, got {self.jobs}")
        fs = self.fringe_settings
        if int(fs.phi_steps) != fs.phi_steps or fs.phi_steps < 3:
            raise ConfigError("fringe_settings.phi_steps", f"must be an integer >= 3, got {fs.phi_steps}")
        if not (0.0 <= fs.t <= 1.0):
            raise ConfigError("fringe_settings.t", f"must lie in [0, 1], got {fs.t}")
        if not (math.isfinite(fs.nbar1) and fs.nbar1 >= 0):
            raise ConfigError("fringe_settings.nbar1", f"must be finite and >= 0, got {fs.nbar1}")

    def t_grid(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_stop, int(self.t_steps))

    def with_overrides(self, **overrides) -> "ScanConfig":
        """Apply non-None overrides; keys under ``fringe_settings`` use a ``fringe_`` prefix."""
        top, nested = {}, {}
        fringe_names = {f.name for f in fields(FringeSettings)}
        for key, value in overrides.items():
            if value is None:
                continue
            if key.startswith("fringe_") and key[len("fringe_"):] in fringe_names:
                nested[key[len("fringe_"):]] = value
            else:
                top[key] = value
        if nested:
            top["fringe_settings"] = replace(self.fringe_settings, **nested)
        return replace(self, **top)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["nbar"] = list(self.nbar)
        return d


def load_config(path: Optional[str]) -> ScanConfig:
    if path is None:
        return ScanConfig()
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"{path} is not valid JSON: {exc}") from None
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ScanConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a JSON object")
    known = {f.name for f in fields(ScanConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    raw = dict(raw)
    fringe_raw = raw.pop("fringe_settings", None)
    if fringe_raw is not None:
        if not isinstance(fringe_raw, dict):
            raise ConfigError("fringe_settings", "must be an object")
        bad = set(fringe_raw) - {f.name for f in fields(FringeSettings)}
        if bad:
            raise ConfigError(f"fringe_settings.{sorted(bad)[0]}", "unknown configuration key")
        raw["fringe_settings"] = FringeSettings(**fringe_raw)
    try:
        return ScanConfig(**raw)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None
