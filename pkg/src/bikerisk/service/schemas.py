"""Request and response models for the HTTP API."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class PointModel(BaseModel):
    lat: float = Field(ge=-90, le=90)
    lon: float = Field(ge=-180, le=180)


class RouteRequest(BaseModel):
    from_: PointModel = Field(alias="from")
    to: PointModel
    waypoints: list[PointModel] = Field(default_factory=list)
    alpha: float = Field(ge=0.0, le=1.0)

    model_config = {"populate_by_name": True}


class RouteResponse(BaseModel):
    nodes: list[int]
    coordinates: list[list[float]]  # [lat, lon] per node
    total_risk: float
    total_discomfort: float
    total_length_m: float
    total_cost: Optional[float]
    alpha: float


class GridResponse(BaseModel):
    bbox: dict
    nx: int
    ny: int
    margin: float
    order: str
    values: list[float]
    transform: str


class HealthResponse(BaseModel):
    status: str
    version: str
    config: dict
    counts: dict


class StatsRow(BaseModel):
    key: dict
    n: int
    n_severe: int
    p: float
    sigma: float
