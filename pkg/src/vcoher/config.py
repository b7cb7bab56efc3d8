"""Flat run configuration shared by every CLI subcommand."""

from __future__ import annotations

import dataclasses
import difflib
import json
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path

from .bistability import OBParams
from .errors import ConfigError
from .model import SystemParams
from .response import ResponseScale


@dataclass(frozen=True)
class RunConfig:
    # physical parameters
    gamma2: float = 1.0
    gamma3: float = 1.0
    eta: float = 0.0
    omega_c_mag: float = 2.0
    phi_c: float = 0.0
    omega_p_mag: float = 0.01
    phi_p: float = 0.0
    delta_c: float = 0.0
    delta: float = 0.0
    # observables
    kappa: float = 1.0
    w: float = 1e6
    # cavity
    c_coop: float = 400.0
    x_to_omega_p: float = 1.0
    phase_x: float = 0.0
    # run control; None selects the subcommand default
    mode: str | None = None
    sweep_variable: str | None = None
    sweep_start: float = -10.0
    sweep_stop: float = 10.0
    sweep_count: int = 401
    k_max: int = 6
    out_path: str | None = None

    def system(self) -> SystemParams:
        return SystemParams(**{f.name: getattr(self, f.name) for f in fields(SystemParams)})

    def scale(self) -> ResponseScale:
        return ResponseScale(self.kappa, self.w)

    def cavity(self) -> OBParams:
        return OBParams(self.c_coop, self.x_to_omega_p, self.phase_x)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


KEYS = {f.name: f for f in fields(RunConfig)}
INT_KEYS = {"sweep_count", "k_max"}
STR_KEYS = {"mode", "sweep_variable", "out_path"}

_DERIVED = {
    "delta_p": "delta_p is derived as delta + delta_c and cannot be set; give delta (two-photon detuning) "
               "and/or delta_c (coupling detuning) instead",
}


def _unknown_key_message(key: str) -> str:
    if key in _DERIVED:
        return _DERIVED[key]
    hint = difflib.get_close_matches(key, KEYS, n=3, cutoff=0.6)
    if "delta" in key.lower() or key.lower().startswith("dp"):
        hint = ["delta", "delta_c"]
    msg = f"unknown configuration key {key!r}"
    if hint:
        msg += "; did you mean " + " or ".join(repr(h) for h in hint) + "?"
    return msg


def coerce(key: str, value):
    """Type-check one value against its key."""
    if key not in KEYS:
        raise ConfigError(_unknown_key_message(key))
    if key in STR_KEYS:
        if value is None or isinstance(value, str):
            return value
        raise ConfigError(f"{key} must be a string or null, got {value!r}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if key in INT_KEYS:
        if float(value) != int(value):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    return float(value)


def from_mapping(data: dict, base: RunConfig | None = None) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a flat JSON object")
    values = (base or RunConfig()).to_dict()
    for key, value in data.items():
        values[key] = coerce(key, value)
    cfg = RunConfig(**values)
    try:  # surface invalid parameter combinations as configuration errors
        cfg.system()
        cfg.scale()
        cfg.cavity()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def recipe_names() -> list[str]:
    folder = resources.files("vcoher") / "recipes"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_recipe(name: str) -> dict:
    names = recipe_names()
    if name not in names:
        raise ConfigError(f"unknown recipe {name!r}; available: {', '.join(names)}")
    text = (resources.files("vcoher") / "recipes" / f"{name}.json").read_text()
    return json.loads(text)


def dump(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)
