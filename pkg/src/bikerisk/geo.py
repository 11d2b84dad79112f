"""Basic geographic primitives: WGS84 points, bounding boxes, geodesic distance."""

from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_M = 6_371_000.0


@dataclass(frozen=True)
class GeoPoint:
    """A WGS84 coordinate in degrees."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned lat/lon box with strictly ordered corners."""

    min: GeoPoint
    max: GeoPoint

    def __post_init__(self) -> None:
        if not (self.min.lat < self.max.lat and self.min.lon < self.max.lon):
            raise ValueError("bounding box corners must satisfy min < max on both axes")

    @classmethod
    def from_extents(cls, min_lat: float, min_lon: float, max_lat: float, max_lon: float) -> "BoundingBox":
        return cls(GeoPoint(min_lat, min_lon), GeoPoint(max_lat, max_lon))

    @property
    def width(self) -> float:
        return self.max.lon - self.min.lon

    @property
    def height(self) -> float:
        return self.max.lat - self.min.lat

    def contains(self, lat: float, lon: float) -> bool:
        """Closed membership test on both axes."""
        return self.min.lat <= lat <= self.max.lat and self.min.lon <= lon <= self.max.lon

    def expanded(self, margin_deg: float) -> "BoundingBox":
        if margin_deg < 0:
            raise ValueError("margin must be non-negative")
        if margin_deg == 0:
            return self
        return BoundingBox(
            GeoPoint(self.min.lat - margin_deg, self.min.lon - margin_deg),
            GeoPoint(self.max.lat + margin_deg, self.max.lon + margin_deg),
        )


def haversine_m(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance in meters between two WGS84 points."""
    phi1 = math.radians(lat1)
    phi2 = math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


def point_distance_m(a: GeoPoint, b: GeoPoint) -> float:
    return haversine_m(a.lat, a.lon, b.lat, b.lon)
