"""JSON configuration files and the shipped presets."""
from __future__ import annotations

import dataclasses
import json
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .sim import SimConfig

REQUIRED = (
    "steps",
    "period",
    "initial_states",
    "process_noise",
    "anchor_meas_noise",
    "ordinary_meas_noise",
    "range_noise",
)
KNOWN = tuple(f.name for f in dataclasses.fields(SimConfig))
PRESETS = ("paper_sec4", "demo")


def preset_path(name: str):
    return resources.files("rangesmf").joinpath("presets", f"{name}.json")


def parse_config(text: str, source: str = "<string>") -> SimConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be an object")
    unknown = sorted(set(raw) - set(KNOWN))
    if unknown:
        raise ConfigError(f"{source}: unknown keys {unknown}")
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"{source}: missing required field(s) {missing}")
    try:
        return SimConfig(**raw)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def load_config(path) -> SimConfig:
    """Load a config file; a bare preset name (``paper_sec4``, ``demo``) loads the shipped copy."""
    p = Path(path)
    if not p.is_file() and str(path) in PRESETS:
        return parse_config(preset_path(str(path)).read_text(), f"preset:{path}")
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_config(p.read_text(), str(p))


def dump_config(cfg: SimConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def save_config(cfg: SimConfig, path) -> None:
    Path(path).write_text(dump_config(cfg))
