import math

import numpy as np
import pytest

from bikerisk.density import (
    EvaluationGrid,
    KernelParams,
    RiskGrid,
    SeverityWeights,
    box_cox,
    estimate_density,
    estimate_partitioned,
    kernel,
    normalize_by_traffic,
    reweight,
    trapezoid_mass,
)
from bikerisk.errors import DensityError
from bikerisk.geo import BoundingBox, GeoPoint
from bikerisk.gridio import grid_from_dict, grid_to_dict, load_grid, save_grid

from helpers import unit_box

H = 0.003
K0 = 1.0 / (2.0 * math.pi * H)


def grid_56x44(margin=0.0):
    return EvaluationGrid(unit_box(), 56, 44, margin=margin)


class TestKernel:
    def test_zero_offset_value(self):
        assert kernel((0.0, 0.0), KernelParams(H)) == pytest.approx(K0, abs=1e-12)

    def test_symmetry(self):
        p = KernelParams(H)
        rng = np.random.default_rng(5)
        for v in rng.normal(0, 0.05, size=(20, 2)):
            assert kernel(v, p) == kernel(-v, p)

    def test_value_at_two_h_radius(self):
        # ||v||^2 = 2h puts the exponent at exactly -1
        v = (math.sqrt(2 * H), 0.0)
        assert kernel(v, KernelParams(H)) == pytest.approx(math.exp(-1) * K0, rel=1e-12)

    def test_maximal_at_origin(self):
        p = KernelParams(H)
        rng = np.random.default_rng(6)
        offs = rng.normal(0, 0.1, size=(50, 2))
        assert np.all(kernel(offs, p) <= K0)

    def test_invalid_params(self):
        with pytest.raises(DensityError):
            KernelParams(0.0)
        with pytest.raises(DensityError):
            KernelParams(0.003, m=3)


class TestEstimate:
    def test_single_point_at_vertex(self):
        g = grid_56x44()
        pt = GeoPoint(float(g.lats()[20]), float(g.lons()[30]))
        rg = estimate_density([pt], g, KernelParams(H))
        assert rg.values[20, 30] == pytest.approx(K0, abs=1e-9)

    def test_two_symmetric_points(self):
        g = grid_56x44()
        lat = float(g.lats()[22])
        lon = float(g.lons()[28])
        d = 0.04
        rg = estimate_density([GeoPoint(lat, lon - d), GeoPoint(lat, lon + d)], g, KernelParams(H))
        assert rg.values[22, 28] == pytest.approx(kernel((0.0, d), KernelParams(H)), rel=1e-12)

    def test_doubling_points_leaves_grid_unchanged(self):
        g = grid_56x44()
        rng = np.random.default_rng(1)
        pts = [GeoPoint(float(a), float(b)) for a, b in rng.uniform(0.2, 0.8, size=(40, 2))]
        once = estimate_density(pts, g, KernelParams(H))
        twice = estimate_density(pts + pts, g, KernelParams(H))
        assert np.allclose(once.values, twice.values, atol=1e-12, rtol=0)

    def test_empty_points_error(self):
        with pytest.raises(DensityError, match="no observations"):
            estimate_density([], grid_56x44(), KernelParams(H))

    def test_point_outside_extended_window_rejected(self):
        with pytest.raises(DensityError):
            estimate_density([GeoPoint(2.0, 0.5)], grid_56x44(), KernelParams(H))

    def test_mass_captured_for_interior_points(self):
        g = grid_56x44()
        m = 3 * math.sqrt(H)
        rng = np.random.default_rng(2)
        pts = [GeoPoint(float(a), float(b)) for a, b in rng.uniform(m, 1 - m, size=(30, 2))]
        assert trapezoid_mass(estimate_density(pts, g, KernelParams(H))) >= 0.95

    def test_translation_equivariance(self):
        rng = np.random.default_rng(3)
        pts = [GeoPoint(float(a), float(b)) for a, b in rng.uniform(0.3, 0.7, size=(25, 2))]
        g1 = grid_56x44()
        rg1 = estimate_density(pts, g1, KernelParams(H))
        off = 0.731
        g2 = EvaluationGrid(BoundingBox.from_extents(off, off, 1 + off, 1 + off), 56, 44)
        pts2 = [GeoPoint(p.lat + off, p.lon + off) for p in pts]
        rg2 = estimate_density(pts2, g2, KernelParams(H))
        assert np.abs(rg1.values - rg2.values).max() < 1e-12

    def test_bandwidth_monotonicity_at_isolated_point(self):
        g = grid_56x44()
        pt = GeoPoint(float(g.lats()[22]), float(g.lons()[28]))
        values = [
            estimate_density([pt], g, KernelParams(h)).values[22, 28]
            for h in (0.001, 0.003, 0.01)
        ]
        assert values[0] > values[1] > values[2]

    def test_extended_window_restriction_matches_study_axes(self):
        g = grid_56x44(margin=0.05)
        lats, lons = g.extended_axes()
        ex, ey = g.extension_cells()
        assert np.array_equal(lats[ey : ey + g.ny], g.lats())
        assert np.array_equal(lons[ex : ex + g.nx], g.lons())
        assert g.extended_window().min.lat == pytest.approx(g.bbox.min.lat - ey * g.dy)

    def test_renormalized_mass_equals_inside_fraction(self):
        g = grid_56x44(margin=0.2)
        rng = np.random.default_rng(4)
        inside = [GeoPoint(float(a), float(b)) for a, b in rng.uniform(0.3, 0.7, size=(30, 2))]
        outside = [GeoPoint(-0.1, -0.1)] * 10
        rg = estimate_density(inside + outside, g, KernelParams(H), renormalize=True)
        assert trapezoid_mass(rg) == pytest.approx(30 / 40, rel=1e-9)


class TestPartitioned:
    def test_reconstruction_equals_pooled(self):
        g = grid_56x44()
        rng = np.random.default_rng(7)
        pts = [GeoPoint(float(a), float(b)) for a, b in rng.uniform(0.1, 0.9, size=(90, 2))]
        labels = rng.integers(0, 3, size=90)
        parts = {s: [p for p, l in zip(pts, labels) if l == s] for s in range(3)}
        pooled = estimate_density(pts, g, KernelParams(H))
        recon = estimate_partitioned(parts, g, KernelParams(H)).pooled_reconstruction()
        assert np.abs(pooled.values - recon.values).max() < 1e-12

    def test_single_partition_is_identity(self):
        g = grid_56x44()
        rng = np.random.default_rng(8)
        pts = [GeoPoint(float(a), float(b)) for a, b in rng.uniform(0.2, 0.8, size=(15, 2))]
        part = estimate_partitioned({"all": pts}, g, KernelParams(H))
        pooled = estimate_density(pts, g, KernelParams(H))
        assert np.array_equal(part.pooled_reconstruction().values, pooled.values)

    def test_two_singletons_average(self):
        g = grid_56x44()
        a, b = GeoPoint(0.4, 0.4), GeoPoint(0.6, 0.6)
        part = estimate_partitioned({"a": [a], "b": [b]}, g, KernelParams(H))
        expected = 0.5 * (part["a"].values + part["b"].values)
        assert np.allclose(part.pooled_reconstruction().values, expected, atol=1e-15, rtol=0)

    def test_empty_partition_skipped_all_empty_error(self):
        g = grid_56x44()
        part = estimate_partitioned({"a": [GeoPoint(0.5, 0.5)], "b": []}, g, KernelParams(H))
        assert set(part.grids) == {"a"}
        with pytest.raises(DensityError):
            estimate_partitioned({"a": [], "b": []}, g, KernelParams(H))


class TestSeverityWeights:
    def test_default_ratio_normalizes_exactly(self):
        w = SeverityWeights.from_ratio(1, 6, 6)
        assert w.as_tuple() == (1 / 13, 6 / 13, 6 / 13)
        assert sum(w.as_tuple()) == 1.0

    def test_invalid_weights(self):
        with pytest.raises(DensityError):
            SeverityWeights(0.5, 0.1, 0.1)
        with pytest.raises(DensityError):
            SeverityWeights.from_ratio(0, 0, 0)
        with pytest.raises(DensityError):
            SeverityWeights(-0.5, 1.0, 0.5)


class TestReweight:
    def setup_method(self):
        self.g = EvaluationGrid(unit_box(), 8, 6)
        rng = np.random.default_rng(9)
        self.grids = {k: RiskGrid(self.g, rng.uniform(0, 2, size=(6, 8))) for k in ("L", "S", "D")}

    def test_selector_weights(self):
        out = reweight(self.grids, {"L": 1.0, "S": 0.0, "D": 0.0})
        assert np.array_equal(out.values, self.grids["L"].values)

    def test_pointwise_mixture(self):
        out = reweight(self.grids, {"L": 1 / 13, "S": 6 / 13, "D": 6 / 13})
        expected = (self.grids["L"].values + 6 * self.grids["S"].values + 6 * self.grids["D"].values) / 13
        assert np.allclose(out.values, expected, rtol=0, atol=1e-15)

    def test_equal_weights_equal_sizes_is_pooled(self):
        g = grid_56x44()
        a = [GeoPoint(0.3, 0.3), GeoPoint(0.35, 0.4)]
        b = [GeoPoint(0.7, 0.7), GeoPoint(0.6, 0.65)]
        parts = estimate_partitioned({"a": a, "b": b}, g, KernelParams(H))
        mixed = reweight(dict(parts.grids), {"a": 0.5, "b": 0.5})
        pooled = estimate_density(a + b, g, KernelParams(H))
        assert np.abs(mixed.values - pooled.values).max() < 1e-12

    def test_mismatched_grids_rejected(self):
        other = EvaluationGrid(unit_box(), 9, 6)
        bad = {"L": self.grids["L"], "S": RiskGrid(other, np.zeros((6, 9)))}
        with pytest.raises(DensityError):
            reweight(bad, {"L": 0.5, "S": 0.5})


class TestTrafficNormalization:
    def setup_method(self):
        self.g = EvaluationGrid(unit_box(), 10, 8)

    def test_constant_traffic_preserves_shape(self):
        rng = np.random.default_rng(10)
        joint = RiskGrid(self.g, rng.uniform(0.1, 1.0, size=(8, 10)))
        traffic = RiskGrid(self.g, np.full((8, 10), 4.0))
        out = normalize_by_traffic(joint, traffic)
        assert np.allclose(out.values, joint.values / 4.0, rtol=0, atol=1e-15)

    def test_floor_applies_below_relative_threshold(self):
        joint = RiskGrid(self.g, np.ones((8, 10)))
        traffic_values = np.full((8, 10), 10.0)
        traffic_values[3, 4] = 1e-6  # far below floor_fraction * max
        out = normalize_by_traffic(joint, RiskGrid(self.g, traffic_values), floor_fraction=1e-3)
        assert out.values[3, 4] == pytest.approx(1.0 / (1e-3 * 10.0))
        assert np.all(np.isfinite(out.values))

    def test_identical_grids_give_unity(self):
        rng = np.random.default_rng(11)
        v = rng.uniform(0.5, 1.5, size=(8, 10))
        rg = RiskGrid(self.g, v)
        out = normalize_by_traffic(rg, rg)
        assert np.allclose(out.values, 1.0, rtol=0, atol=1e-15)

    def test_rescaling_traffic_invariance_when_unfloored(self):
        rng = np.random.default_rng(12)
        joint = RiskGrid(self.g, rng.uniform(0.1, 1.0, size=(8, 10)))
        traffic = RiskGrid(self.g, rng.uniform(1.0, 2.0, size=(8, 10)))
        a = normalize_by_traffic(joint, traffic)
        b = normalize_by_traffic(joint, RiskGrid(self.g, traffic.values * 37.5))
        assert np.allclose(a.values, b.values * 37.5, rtol=1e-12, atol=0)

    def test_zero_traffic_is_an_error(self):
        joint = RiskGrid(self.g, np.ones((8, 10)))
        with pytest.raises(DensityError):
            normalize_by_traffic(joint, RiskGrid(self.g, np.zeros((8, 10))))

    def test_floor_fraction_validated(self):
        joint = RiskGrid(self.g, np.ones((8, 10)))
        with pytest.raises(DensityError):
            normalize_by_traffic(joint, joint, floor_fraction=1.5)


class TestBoxCox:
    def setup_method(self):
        self.g = EvaluationGrid(unit_box(), 4, 3)

    def test_half_exponent_values(self):
        rg = RiskGrid(self.g, np.array([[4.0, 0.0, 1.0, 9.0]] * 3))
        out = box_cox(rg, 0.5)
        assert np.array_equal(out.values, np.array([[2.0, 0.0, 1.0, 3.0]] * 3))

    def test_identity_exponent(self):
        rng = np.random.default_rng(13)
        rg = RiskGrid(self.g, rng.uniform(0, 5, size=(3, 4)))
        assert np.array_equal(box_cox(rg, 1.0).values, rg.values)

    def test_order_preserved(self):
        rng = np.random.default_rng(14)
        v = rng.uniform(0, 5, size=(3, 4))
        rg = box_cox(RiskGrid(self.g, v), 0.5)
        flat, tflat = v.ravel(), rg.values.ravel()
        for i in range(len(flat)):
            for j in range(len(flat)):
                if flat[i] < flat[j]:
                    assert tflat[i] < tflat[j]

    def test_argmax_preserved(self):
        rng = np.random.default_rng(15)
        rg = RiskGrid(self.g, rng.uniform(0, 5, size=(3, 4)))
        assert rg.argmax_vertex() == box_cox(rg, 0.5).argmax_vertex()

    def test_invalid_exponent(self):
        rg = RiskGrid(self.g, np.ones((3, 4)))
        with pytest.raises(DensityError):
            box_cox(rg, 0.0)


class TestGridIO:
    def test_round_trip_is_exact(self, tmp_path):
        g = EvaluationGrid(unit_box(), 12, 9, margin=0.01)
        rng = np.random.default_rng(16)
        rg = RiskGrid(g, rng.uniform(0, 3, size=(9, 12)))
        path = tmp_path / "grid.json"
        save_grid(rg, path)
        back = load_grid(path)
        assert back.grid == rg.grid
        assert np.array_equal(back.values, rg.values)
        # serialization itself is deterministic
        save_grid(back, tmp_path / "grid2.json")
        assert path.read_bytes() == (tmp_path / "grid2.json").read_bytes()

    def test_dict_round_trip(self):
        g = EvaluationGrid(unit_box(), 5, 4)
        rg = RiskGrid(g, np.arange(20, dtype=float).reshape(4, 5))
        assert np.array_equal(grid_from_dict(grid_to_dict(rg)).values, rg.values)

    def test_malformed_document(self):
        from bikerisk.errors import DataError

        with pytest.raises(DataError):
            grid_from_dict({"nx": 5})


def test_risk_grid_shape_validation():
    g = EvaluationGrid(unit_box(), 5, 4)
    with pytest.raises(DensityError):
        RiskGrid(g, np.zeros((5, 4)))
    with pytest.raises(DensityError):
        RiskGrid(g, np.full((4, 5), -1.0))
    with pytest.raises(DensityError):
        RiskGrid(g, np.full((4, 5), np.nan))
