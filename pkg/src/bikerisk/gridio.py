"""Self-describing JSON serialization of risk grids."""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Union

import numpy as np

from .density import EvaluationGrid, RiskGrid
from .errors import DataError
from .geo import BoundingBox

Target = Union[str, Path, IO[str]]


def grid_to_dict(grid: RiskGrid) -> dict:
    g = grid.grid
    return {
        "bbox": {
            "min_lat": g.bbox.min.lat,
            "min_lon": g.bbox.min.lon,
            "max_lat": g.bbox.max.lat,
            "max_lon": g.bbox.max.lon,
        },
        "nx": g.nx,
        "ny": g.ny,
        "margin": g.margin,
        "order": "row-major, south-to-north rows, west-to-east columns",
        "values": grid.values.ravel().tolist(),
    }


def grid_from_dict(doc: dict) -> RiskGrid:
    try:
        bbox = BoundingBox.from_extents(
            doc["bbox"]["min_lat"], doc["bbox"]["min_lon"], doc["bbox"]["max_lat"], doc["bbox"]["max_lon"]
        )
        grid = EvaluationGrid(bbox, int(doc["nx"]), int(doc["ny"]), float(doc.get("margin", 0.0)))
        values = np.asarray(doc["values"], dtype=float).reshape(grid.ny, grid.nx)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed grid document: {exc}") from exc
    return RiskGrid(grid, values)


def save_grid(grid: RiskGrid, target: Target) -> None:
    doc = grid_to_dict(grid)
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fp:
            json.dump(doc, fp)
    else:
        json.dump(doc, target)


def load_grid(source: Target) -> RiskGrid:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fp:
            return grid_from_dict(json.load(fp))
    return grid_from_dict(json.load(source))
