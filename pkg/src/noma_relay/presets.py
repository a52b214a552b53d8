"""Named experiment presets shipped as package data.

Each preset pins the channel variances of one published comparison, the
scheme list that figure contrasts, and master_seed 20180001 so reruns are
reproducible.  Trial counts are sized for minutes-scale runs; reproduction is
qualitative (curve shapes and orderings), not a value-for-value match.
"""

from __future__ import annotations

from importlib import resources

from .config import ExperimentConfig, parse_config
from .errors import ConfigError

__all__ = ["preset_names", "load_preset"]


def _preset_dir():
    return resources.files("noma_relay") / "presets"


def preset_names() -> list[str]:
    return sorted(p.name[: -len(".toml")] for p in _preset_dir().iterdir() if p.name.endswith(".toml"))


def load_preset(name: str) -> ExperimentConfig:
    path = _preset_dir() / f"{name}.toml"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_config(path.read_text(encoding="utf-8"), source=f"preset:{name}")
