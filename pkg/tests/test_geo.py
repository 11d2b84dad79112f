import math

import pytest

from bikerisk.geo import BoundingBox, GeoPoint, haversine_m, point_distance_m


def test_geopoint_validation():
    GeoPoint(47.37, 8.54)
    with pytest.raises(ValueError):
        GeoPoint(91.0, 0.0)
    with pytest.raises(ValueError):
        GeoPoint(0.0, -180.5)


def test_bbox_ordering_enforced():
    with pytest.raises(ValueError):
        BoundingBox(GeoPoint(1.0, 0.0), GeoPoint(0.0, 1.0))
    box = BoundingBox.from_extents(0.0, 0.0, 1.0, 2.0)
    assert box.width == 2.0 and box.height == 1.0


def test_bbox_contains_closed():
    box = BoundingBox.from_extents(0.0, 0.0, 1.0, 1.0)
    assert box.contains(0.0, 0.0)
    assert box.contains(1.0, 1.0)
    assert not box.contains(1.0000001, 0.5)


def test_haversine_known_values():
    # one degree of latitude is ~111.2 km anywhere
    assert haversine_m(0.0, 0.0, 1.0, 0.0) == pytest.approx(111_195, rel=1e-3)
    # longitude degrees shrink with latitude
    at_equator = haversine_m(0.0, 0.0, 0.0, 1.0)
    at_47 = haversine_m(47.0, 0.0, 47.0, 1.0)
    assert at_47 == pytest.approx(at_equator * math.cos(math.radians(47.0)), rel=1e-3)
    assert haversine_m(47.3, 8.5, 47.3, 8.5) == 0.0


def test_point_distance_symmetry():
    a = GeoPoint(47.3650, 8.5141)
    b = GeoPoint(47.3886, 8.5523)
    assert point_distance_m(a, b) == point_distance_m(b, a)
    assert point_distance_m(a, b) > 0


def test_expanded_margin():
    box = BoundingBox.from_extents(0.0, 0.0, 1.0, 1.0)
    bigger = box.expanded(0.25)
    assert bigger.min.lat == -0.25 and bigger.max.lon == 1.25
    assert box.expanded(0.0) is box
    with pytest.raises(ValueError):
        box.expanded(-0.1)
