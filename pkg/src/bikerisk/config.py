"""Pipeline configuration: data paths, estimation parameters, service address.

Numeric defaults are the production calibration for the Zurich study region;
fixture configs override the paths and keep the parameters. Relative data
paths resolve against the config file's directory, or against the
``BIKERISK_DATA`` environment variable when set. ``BIKERISK_HOST`` and
``BIKERISK_PORT`` override the listen address.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, Field, field_validator

from .discomfort import DiscomfortParams
from .density import SEVERITY_RATIO_PRESETS, SeverityWeights
from .errors import ConfigError
from .geo import BoundingBox


class BBoxConfig(BaseModel):
    min_lat: float = 47.3650
    min_lon: float = 8.5141
    max_lat: float = 47.3886
    max_lon: float = 8.5523

    def to_bbox(self) -> BoundingBox:
        return BoundingBox.from_extents(self.min_lat, self.min_lon, self.max_lat, self.max_lon)


class DiscomfortConfig(BaseModel):
    grade_floor: float = -0.025
    rate: float = 15.0
    amplitude: float = 2.0

    def to_params(self) -> DiscomfortParams:
        return DiscomfortParams(self.grade_floor, self.rate, self.amplitude)


class PipelineConfig(BaseModel):
    accidents: Optional[str] = None
    traces: Optional[str] = None
    network: Optional[str] = None
    climate: Optional[str] = None
    baselines_dir: Optional[str] = None

    bandwidth: float = Field(default=0.003, gt=0)
    severity_ratio: Union[str, tuple[float, float, float]] = "default"
    grid_nx: int = Field(default=560, ge=2)
    grid_ny: int = Field(default=440, ge=2)
    margin: float = Field(default=0.01, ge=0)
    traffic_floor: float = Field(default=1e-3, gt=0, lt=1)
    box_cox_lambda: float = Field(default=0.5, gt=0)
    year_range: tuple[int, int] = (2011, 2017)
    bbox: BBoxConfig = Field(default_factory=BBoxConfig)
    discomfort: DiscomfortConfig = Field(default_factory=DiscomfortConfig)

    host: str = "127.0.0.1"
    port: int = 8000
    cors_origins: list[str] = Field(default_factory=list)
    static_dir: Optional[str] = None  # built web UI to serve at /, if any

    @field_validator("severity_ratio")
    @classmethod
    def _check_ratio(cls, v):
        if isinstance(v, str):
            if v not in SEVERITY_RATIO_PRESETS:
                raise ValueError(f"unknown severity ratio preset {v!r}; known: {sorted(SEVERITY_RATIO_PRESETS)}")
            return v
        if len(v) != 3 or any(x < 0 for x in v) or sum(v) <= 0:
            raise ValueError("severity ratio needs three non-negative values with a positive sum")
        return tuple(float(x) for x in v)

    def severity_weights(self) -> SeverityWeights:
        ratio = SEVERITY_RATIO_PRESETS[self.severity_ratio] if isinstance(self.severity_ratio, str) else self.severity_ratio
        return SeverityWeights.from_ratio(*ratio)

    def study_bbox(self) -> BoundingBox:
        return self.bbox.to_bbox()


def load_config(path: Union[str, Path]) -> PipelineConfig:
    """Read a JSON config file, resolving relative paths and env overrides."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = PipelineConfig.model_validate(doc)
    except ValueError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc

    base = Path(os.environ.get("BIKERISK_DATA", path.parent))
    for attr in ("accidents", "traces", "network", "climate", "baselines_dir", "static_dir"):
        value = getattr(cfg, attr)
        if value is not None and not Path(value).is_absolute():
            setattr(cfg, attr, str(base / value))

    host = os.environ.get("BIKERISK_HOST")
    if host:
        cfg.host = host
    port = os.environ.get("BIKERISK_PORT")
    if port:
        try:
            cfg.port = int(port)
        except ValueError as exc:
            raise ConfigError(f"BIKERISK_PORT must be an integer, got {port!r}") from exc
    return cfg


def require_paths(cfg: PipelineConfig, *attrs: str) -> None:
    for attr in attrs:
        value = getattr(cfg, attr)
        if value is None:
            raise ConfigError(f"config is missing the {attr!r} path")
        if not Path(value).exists():
            raise ConfigError(f"configured {attr} path does not exist: {value}")


def config_echo(cfg: PipelineConfig) -> dict:
    """The effective numeric parameters, for health reporting and run manifests."""
    weights = cfg.severity_weights()
    return {
        "bandwidth": cfg.bandwidth,
        "severity_ratio": cfg.severity_ratio if isinstance(cfg.severity_ratio, str) else list(cfg.severity_ratio),
        "severity_weights": list(weights.as_tuple()),
        "grid_nx": cfg.grid_nx,
        "grid_ny": cfg.grid_ny,
        "margin": cfg.margin,
        "traffic_floor": cfg.traffic_floor,
        "box_cox_lambda": cfg.box_cox_lambda,
        "bbox": cfg.bbox.model_dump(),
        "discomfort": cfg.discomfort.model_dump(),
        "year_range": list(cfg.year_range),
    }
