"""Recursive quartering of an extraction region until every cell holds few enough points.

The quartering is global: one iteration splits every cell of the current grid
into four, so after k iterations the region is a uniform 2^k x 2^k grid with
4^k cells. Iteration stops as soon as no cell holds more than the threshold.
Cell membership is half-open ([min, max) on each axis) with the outermost max
edges closed, so every point belongs to exactly one cell.
"""

from __future__ import annotations

import logging
from typing import Iterable, Sequence

from ..errors import DataError
from ..geo import BoundingBox, GeoPoint

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 20


def _cell_indices(box: BoundingBox, points: Sequence[GeoPoint], k: int) -> list[tuple[int, int]]:
    n = 1 << k
    w = box.width / n
    h = box.height / n
    out = []
    for p in points:
        ix = min(int((p.lon - box.min.lon) / w), n - 1)
        iy = min(int((p.lat - box.min.lat) / h), n - 1)
        out.append((ix, iy))
    return out


def subdivide_region(
    box: BoundingBox,
    points: Iterable[GeoPoint],
    threshold: int,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> list[BoundingBox]:
    """Return the leaf cells of the uniform quartering of ``box``.

    Every returned cell contains at most ``threshold`` points, except when two
    or more coincident points exceed the threshold on their own: subdividing
    can never separate those, so the loop stops at ``max_depth`` and logs the
    offending cell instead of recursing forever.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    pts = list(points)
    for p in pts:
        if not box.contains(p.lat, p.lon):
            raise DataError(f"point ({p.lat}, {p.lon}) outside the extraction region")

    k = 0
    while True:
        counts: dict[tuple[int, int], int] = {}
        for idx in _cell_indices(box, pts, k):
            counts[idx] = counts.get(idx, 0) + 1
        worst = max(counts.values(), default=0)
        if worst <= threshold:
            break
        if k >= max_depth:
            n = 1 << k
            w = box.width / n
            h = box.height / n
            for (ix, iy), c in counts.items():
                if c > threshold:
                    log.warning(
                        "subdivision stopped at depth %d: cell lat [%.7f, %.7f) lon [%.7f, %.7f) "
                        "still holds %d points (threshold %d); points are likely coincident",
                        k,
                        box.min.lat + iy * h,
                        box.min.lat + (iy + 1) * h,
                        box.min.lon + ix * w,
                        box.min.lon + (ix + 1) * w,
                        c,
                        threshold,
                    )
            break
        k += 1

    return _materialize_cells(box, k)


def _materialize_cells(box: BoundingBox, k: int) -> list[BoundingBox]:
    n = 1 << k
    if n == 1:
        return [box]
    # Shared edge coordinates so adjacent cells tile the box exactly.
    lons = [box.min.lon + i * box.width / n for i in range(n)] + [box.max.lon]
    lats = [box.min.lat + i * box.height / n for i in range(n)] + [box.max.lat]
    cells = []
    for iy in range(n):
        for ix in range(n):
            cells.append(
                BoundingBox(GeoPoint(lats[iy], lons[ix]), GeoPoint(lats[iy + 1], lons[ix + 1]))
            )
    return cells


def assign_cells(box: BoundingBox, points: Sequence[GeoPoint], cells: Sequence[BoundingBox]) -> list[int]:
    """Index of the unique cell owning each point, under half-open membership."""
    n = int(round(len(cells) ** 0.5))
    if n * n != len(cells):
        raise ValueError("cells must form a square grid")
    k = n.bit_length() - 1
    if (1 << k) != n:
        raise ValueError("cell grid side must be a power of two")
    return [iy * n + ix for ix, iy in _cell_indices(box, points, k)]
