"""Configuration loading and validation."""

from __future__ import annotations

import os
import re
from enum import Enum
from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from thzmap.estimation.preprocess import Window
from thzmap.estimation.sage import SageConfig

ENV_PATTERN = re.compile(r"\$\{([A-Z0-9_]+)\}")
ENV_LINE_PATTERN = re.compile(r"^\s*([A-Z0-9_]+)\s*=\s*(.*)\s*$")
DEFAULT_ENV_PATH = Path(".env")
DEFAULT_CONFIG_PATH = Path("config/default.yaml")
FILE_KEYS = ("scene_path", "db_path", "pattern_path")


class ConfigLoadError(RuntimeError):
    """Raised when application config cannot be loaded."""


class StrictModel(BaseModel):
    """Immutable strict config model."""

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        protected_namespaces=(),
    )


class Method(str, Enum):
    MAX_SEARCH = "max_search"
    SAGE = "sage"
    SAGE_PLUS_REMOVAL = "sage_plus_removal"


class SimulationSection(StrictModel):
    scatter_spacing_m: float = Field(default=0.02, gt=0.0)
    falloff_exponent: float = Field(default=40.0, ge=0.0)


class NoiseSection(StrictModel):
    """Either an SNR relative to the strongest path or an absolute per-sample floor."""

    snr_db: float | None = 25.0
    floor_db: float | None = None
    seed: int | None = Field(default=None, ge=0)

    @model_validator(mode="after")
    def validate_choice(self) -> "NoiseSection":
        if self.snr_db is not None and self.floor_db is not None:
            raise ValueError("set at most one of snr_db and floor_db")
        return self


class MappingConfig(StrictModel):
    power_margin_db: float = Field(default=6.0, ge=0.0)
    arc_mode: Literal["detect", "known"] = "detect"
    min_span_deg: float = Field(default=15.0, gt=0.0)
    radial_bin_cm: float = Field(default=1.5, gt=0.0)
    tolerance_cm: float = Field(default=3.0, gt=0.0)
    corner_half_span_deg: float = Field(default=12.0, gt=0.0)


class IdentificationConfig(StrictModel):
    enabled: bool = True
    f_query_hz: float = Field(default=300e9, gt=0.0)
    association_cm: float = Field(default=5.0, gt=0.0)
    peak_oversampling: int = Field(default=32, gt=0)


class PipelineConfig(StrictModel):
    scene_path: str = Field(..., min_length=1)
    output_dir: str = Field(default="runs/latest", min_length=1)
    methods: tuple[Method, ...] = Field(default=tuple(Method), min_length=1)
    window: Window = Window.RECTANGULAR
    simulation: SimulationSection = Field(default_factory=SimulationSection)
    sage: SageConfig = Field(default_factory=SageConfig)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    mapping: MappingConfig = Field(default_factory=MappingConfig)
    identification: IdentificationConfig = Field(default_factory=IdentificationConfig)
    pattern_path: str | None = None
    db_path: str | None = None
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_methods(self) -> "PipelineConfig":
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must not repeat")
        return self

    @property
    def noise_seed(self) -> int:
        return self.noise.seed if self.noise.seed is not None else self.seed


def _strip_quotes(value: str) -> str:
    if len(value) < 2:
        return value
    if value[0] == value[-1] and value[0] in {"'", '"'}:
        return value[1:-1]
    return value


def _parse_env_line(line: str, line_number: int) -> tuple[str, str] | None:
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None

    match = ENV_LINE_PATTERN.match(line)
    if match is None:
        raise ConfigLoadError(f"invalid env file line {line_number}")

    key, raw_value = match.groups()
    return key, _strip_quotes(raw_value.strip())


def load_env_file(path: str | Path = DEFAULT_ENV_PATH) -> dict[str, str]:
    """Variables from an optional env file; a missing file yields no values."""
    env_path = Path(path)
    if not env_path.exists():
        return {}

    env_values: dict[str, str] = {}
    for line_number, line in enumerate(env_path.read_text(encoding="utf-8").splitlines(), start=1):
        parsed = _parse_env_line(line, line_number)
        if parsed is None:
            continue
        key, value = parsed
        env_values[key] = value
    return env_values


def _replace_env_tokens(value: str, env_values: dict[str, str]) -> str:
    def replacement(match: re.Match[str]) -> str:
        env_name = match.group(1)
        env_value = env_values.get(env_name)
        if env_value is None:
            raise ConfigLoadError(f"missing environment variable: {env_name}")
        return env_value

    return ENV_PATTERN.sub(replacement, value)


def _resolve_env(value: Any, env_values: dict[str, str]) -> Any:
    if isinstance(value, dict):
        return {k: _resolve_env(v, env_values) for k, v in value.items()}
    if isinstance(value, list):
        return [_resolve_env(item, env_values) for item in value]
    if isinstance(value, str):
        return _replace_env_tokens(value, env_values)
    return value


def _anchor_paths(raw: dict[str, Any], base_dir: Path) -> dict[str, Any]:
    """Input file paths are relative to the config file's directory."""
    anchored = dict(raw)
    for key in FILE_KEYS:
        value = anchored.get(key)
        if isinstance(value, str) and value and not Path(value).is_absolute():
            anchored[key] = str(base_dir / value)
    return anchored


def config_from_mapping(raw: dict[str, Any]) -> PipelineConfig:
    try:
        return PipelineConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigLoadError("config validation failed") from exc


def load_config(path: str | Path = DEFAULT_CONFIG_PATH, env_path: str | Path = DEFAULT_ENV_PATH) -> PipelineConfig:
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigLoadError(f"config file not found: {config_path}")

    try:
        raw = yaml.safe_load(config_path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigLoadError(f"invalid yaml format: {config_path}") from exc

    if raw is None:
        raise ConfigLoadError(f"empty config file: {config_path}")
    if not isinstance(raw, dict):
        raise ConfigLoadError("config root must be a mapping")

    env_values = {**os.environ, **load_env_file(env_path)}
    resolved = _resolve_env(raw, env_values)
    return config_from_mapping(_anchor_paths(resolved, config_path.parent))
