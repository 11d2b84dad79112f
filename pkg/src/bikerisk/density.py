"""Kernel density machinery for the spatial risk surface.

Estimation runs on a regular lat/lon grid. To avoid the spurious boundary
peaks that plain window-limited estimation produces (amplified further by the
traffic ratio), every density is evaluated on an extended window that pads the
study box by a configurable margin at identical grid spacing, then restricted
back to the study box. The Gaussian kernel uses the negative exponent
``exp(-||v||^2 / (2h))``; the positive-exponent form sometimes quoted for this
estimator diverges and cannot integrate to one.

Grid evaluation is exact (one kernel term per observation and vertex, no
binning). The per-vertex summation order is fixed regardless of available
parallelism, so repeated runs produce bitwise-identical surfaces.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, TypeVar

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DensityError
from .geo import BoundingBox, GeoPoint

log = logging.getLogger(__name__)

_CHUNK = 2048


@dataclass(frozen=True)
class KernelParams:
    """Isotropic Gaussian kernel parameters; ``h`` is in squared degrees."""

    h: float = 0.003
    m: int = 2

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise DensityError(f"bandwidth must be positive, got {self.h}")
        if self.m != 2:
            raise DensityError("only two-dimensional estimation is supported")


@dataclass(frozen=True)
class EvaluationGrid:
    """Regular evaluation grid over a study box, plus the extension margin.

    ``nx`` and ``ny`` are the number of equispaced vertices along longitude
    and latitude respectively. The extension margin is rounded up to a whole
    number of grid cells so the study vertices are an exact subgrid of the
    extended window.
    """

    bbox: BoundingBox
    nx: int
    ny: int
    margin: float = 0.0

    def __post_init__(self) -> None:
        if self.nx < 2 or self.ny < 2:
            raise DensityError("grid needs at least 2 divisions per axis")
        if self.margin < 0:
            raise DensityError("extension margin must be non-negative")

    @property
    def dx(self) -> float:
        return self.bbox.width / (self.nx - 1)

    @property
    def dy(self) -> float:
        return self.bbox.height / (self.ny - 1)

    def lons(self) -> np.ndarray:
        return np.linspace(self.bbox.min.lon, self.bbox.max.lon, self.nx)

    def lats(self) -> np.ndarray:
        return np.linspace(self.bbox.min.lat, self.bbox.max.lat, self.ny)

    def extension_cells(self) -> tuple[int, int]:
        """Whole-cell padding (columns, rows) covering the margin on each side."""
        if self.margin == 0:
            return 0, 0
        return math.ceil(self.margin / self.dx), math.ceil(self.margin / self.dy)

    def extended_window(self) -> BoundingBox:
        ex, ey = self.extension_cells()
        if ex == 0 and ey == 0:
            return self.bbox
        return BoundingBox(
            GeoPoint(self.bbox.min.lat - ey * self.dy, self.bbox.min.lon - ex * self.dx),
            GeoPoint(self.bbox.max.lat + ey * self.dy, self.bbox.max.lon + ex * self.dx),
        )

    def extended_axes(self) -> tuple[np.ndarray, np.ndarray]:
        """(lats, lons) of the extended grid; the study axes are exact subarrays."""
        ex, ey = self.extension_cells()
        lats = self.bbox.min.lat + self.dy * np.arange(-ey, self.ny + ey)
        lons = self.bbox.min.lon + self.dx * np.arange(-ex, self.nx + ex)
        lats[ey : ey + self.ny] = self.lats()
        lons[ex : ex + self.nx] = self.lons()
        return lats, lons


@dataclass(frozen=True)
class RiskGrid:
    """Scalar field sampled at the vertices of an evaluation grid.

    ``values`` has shape (ny, nx): rows run south to north, columns west to
    east.
    """

    grid: EvaluationGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        v = self.values
        if v.shape != (self.grid.ny, self.grid.nx):
            raise DensityError(f"values shape {v.shape} does not match grid ({self.grid.ny}, {self.grid.nx})")
        if not np.all(np.isfinite(v)):
            raise DensityError("grid values must be finite")
        if np.any(v < 0):
            raise DensityError("grid values must be non-negative")

    def with_values(self, values: np.ndarray) -> "RiskGrid":
        return RiskGrid(self.grid, values)

    def argmax_vertex(self) -> tuple[int, int]:
        """(row, col) of the maximum value; first occurrence wins."""
        flat = int(np.argmax(self.values))
        return flat // self.grid.nx, flat % self.grid.nx


def kernel(offset: Sequence[float] | np.ndarray, params: KernelParams) -> float | np.ndarray:
    """Gaussian kernel value for a coordinate offset in degrees."""
    v = np.asarray(offset, dtype=float)
    sq = np.sum(v * v, axis=-1)
    norm = (2.0 * math.pi * params.h) ** (params.m / 2.0)
    out = np.exp(-sq / (2.0 * params.h)) / norm
    return float(out) if out.ndim == 0 else out


def _points_to_arrays(points: Iterable[GeoPoint]) -> tuple[np.ndarray, np.ndarray]:
    lats = []
    lons = []
    for p in points:
        lats.append(p.lat)
        lons.append(p.lon)
    return np.asarray(lats), np.asarray(lons)


def _kde_on_axes(plats: np.ndarray, plons: np.ndarray, lats: np.ndarray, lons: np.ndarray, h: float) -> np.ndarray:
    """Mean of Gaussian kernels over all points, evaluated at the axes' grid.

    The separable kernel turns the grid sum into an accumulation of rank-1
    products. Points are processed in fixed-size chunks and BLAS is pinned to
    a single thread so the summation order per vertex never depends on the
    machine's parallelism.
    """
    n = plats.size
    acc = np.zeros((lats.size, lons.size))
    with threadpool_limits(limits=1, user_api="blas"):
        for s in range(0, n, _CHUNK):
            pl = plats[s : s + _CHUNK, None]
            pn = plons[s : s + _CHUNK, None]
            a = np.exp(-((lats[None, :] - pl) ** 2) / (2.0 * h))
            b = np.exp(-((lons[None, :] - pn) ** 2) / (2.0 * h))
            acc += a.T @ b
    acc /= n * (2.0 * math.pi * h)
    return acc


def trapezoid_mass(grid: RiskGrid) -> float:
    """Trapezoid-rule integral of the field over its grid, in density units."""
    g = grid.grid
    return float(np.trapezoid(np.trapezoid(grid.values, g.lons(), axis=1), g.lats()))


def estimate_density(
    points: Sequence[GeoPoint],
    grid: EvaluationGrid,
    params: KernelParams,
    renormalize: bool = False,
) -> RiskGrid:
    """Kernel density estimate of ``points`` on the study grid.

    The estimate is computed over the extended window and restricted back to
    the study box. By default the restricted values are the plain kernel mean
    at each vertex. With ``renormalize=True`` the restricted field is rescaled
    so its trapezoid-rule mass equals the fraction of observations that lie
    inside the study box, which is the form the full pipeline feeds into the
    traffic ratio.
    """
    plats, plons = _points_to_arrays(points)
    if plats.size == 0:
        raise DensityError("no observations")
    window = grid.extended_window()
    if not np.all(
        (plats >= window.min.lat) & (plats <= window.max.lat)
        & (plons >= window.min.lon) & (plons <= window.max.lon)
    ):
        raise DensityError("observations must lie inside the extended estimation window")

    lats, lons = grid.extended_axes()
    ext = _kde_on_axes(plats, plons, lats, lons, params.h)
    ex, ey = grid.extension_cells()
    values = ext[ey : ey + grid.ny, ex : ex + grid.nx].copy()
    out = RiskGrid(grid, values)
    if renormalize:
        mass = trapezoid_mass(out)
        if mass <= 0:
            raise DensityError("estimated mass inside the study box is zero; cannot renormalize")
        box = grid.bbox
        inside = np.count_nonzero(
            (plats >= box.min.lat) & (plats <= box.max.lat)
            & (plons >= box.min.lon) & (plons <= box.max.lon)
        )
        out = out.with_values(values * (inside / plats.size / mass))
    return out


K = TypeVar("K")


@dataclass
class PartitionedDensity(Mapping[K, RiskGrid]):
    """Per-partition density estimates plus the pooled reconstruction."""

    grids: dict[K, RiskGrid]
    counts: dict[K, int]

    def __getitem__(self, key: K) -> RiskGrid:
        return self.grids[key]

    def __iter__(self):
        return iter(self.grids)

    def __len__(self) -> int:
        return len(self.grids)

    def pooled_reconstruction(self) -> RiskGrid:
        """Mixture of the partition estimates with weights n_s / n.

        Equals the single estimate over all points pooled together.
        """
        n = sum(self.counts.values())
        acc = None
        for key, rg in self.grids.items():
            term = (self.counts[key] / n) * rg.values
            acc = term if acc is None else acc + term
        first = next(iter(self.grids.values()))
        return RiskGrid(first.grid, acc)


def estimate_partitioned(
    partitions: Mapping[K, Sequence[GeoPoint]],
    grid: EvaluationGrid,
    params: KernelParams,
    renormalize: bool = False,
) -> PartitionedDensity:
    """Independent density estimate per partition; empty partitions are skipped."""
    grids: dict[K, RiskGrid] = {}
    counts: dict[K, int] = {}
    for key, pts in partitions.items():
        if not pts:
            log.warning("partition %r is empty and was skipped", key)
            continue
        grids[key] = estimate_density(pts, grid, params, renormalize=renormalize)
        counts[key] = len(pts)
    if not grids:
        raise DensityError("all partitions are empty")
    return PartitionedDensity(grids, counts)


@dataclass(frozen=True)
class SeverityWeights:
    """Normalized mixture weights for the three severity classes."""

    a_light: float
    a_severe: float
    a_death: float

    def __post_init__(self) -> None:
        for w in (self.a_light, self.a_severe, self.a_death):
            if w < 0:
                raise DensityError("severity weights must be non-negative")
        if abs(self.a_light + self.a_severe + self.a_death - 1.0) > 1e-9:
            raise DensityError("severity weights must sum to 1; use from_ratio to normalize")

    @classmethod
    def from_ratio(cls, light: float, severe: float, death: float) -> "SeverityWeights":
        total = light + severe + death
        if total <= 0:
            raise DensityError("severity ratio must have a positive sum")
        return cls(light / total, severe / total, death / total)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a_light, self.a_severe, self.a_death)


# The default 1:6:6 weighting follows insurance compensation proportions with
# the death factor damped to avoid over-polarized contours; the undamped
# compensation ratio is available as a named preset.
SEVERITY_RATIO_PRESETS: dict[str, tuple[float, float, float]] = {
    "default": (1.0, 6.0, 6.0),
    "insurance-raw": (1.0, 6.0, 20.0),
}


def _require_aligned(grids: Iterable[RiskGrid]) -> EvaluationGrid:
    it = iter(grids)
    first = next(it).grid
    for g in it:
        if g.grid != first:
            raise DensityError("grids are not aligned on the same evaluation grid")
    return first


def reweight(partition_grids: Mapping[K, RiskGrid], weights: Mapping[K, float]) -> RiskGrid:
    """Pointwise mixture of partition densities with the given weights."""
    if not partition_grids:
        raise DensityError("no partition grids to reweight")
    missing = set(partition_grids) - set(weights)
    if missing:
        raise DensityError(f"missing weights for partitions: {sorted(map(str, missing))}")
    base = _require_aligned(partition_grids.values())
    acc = np.zeros((base.ny, base.nx))
    for key, rg in partition_grids.items():
        acc += weights[key] * rg.values
    return RiskGrid(base, acc)


def normalize_by_traffic(joint: RiskGrid, traffic: RiskGrid, floor_fraction: float = 1e-3) -> RiskGrid:
    """Ratio of accident density to traffic density with a relative floor.

    The denominator is clamped below at ``floor_fraction`` times the traffic
    maximum, so near-empty streets cannot blow up into spurious risk peaks.
    """
    if not 0.0 < floor_fraction < 1.0:
        raise DensityError(f"floor fraction must be in (0, 1), got {floor_fraction}")
    _require_aligned([joint, traffic])
    tmax = float(traffic.values.max())
    if tmax <= 0.0:
        raise DensityError("traffic density is identically zero")
    denom = np.maximum(traffic.values, floor_fraction * tmax)
    return RiskGrid(joint.grid, joint.values / denom)


def box_cox(grid: RiskGrid, exponent: float) -> RiskGrid:
    """Power transform compressing the field's dynamic range for display."""
    if exponent <= 0:
        raise DensityError(f"exponent must be positive, got {exponent}")
    if np.any(grid.values < 0):
        raise DensityError("negative values reached the power transform; upstream bug")
    return grid.with_values(np.power(grid.values, exponent))
