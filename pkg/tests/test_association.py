"""Association costs: gallery behaviour, gates, combined and IoU matrices."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from motrack import (
    BoundingBox,
    Detection,
    DimensionMismatchError,
    EmptyGalleryError,
    Gallery,
    KalmanFilter,
    MissingDescriptorError,
    Tracker,
    TrackerConfig,
    association,
    normalize_descriptor,
)
from motrack.association import (
    GATING_COST,
    appearance_cost_matrix,
    build_cost_matrices,
    combined_cost,
    cosine_gallery_distance,
    iou_cost_matrix,
    iou_distance,
    motion_cost_matrix,
)

DIM = 8


def unit(axis, dim=DIM):
    v = np.zeros(dim)
    v[axis] = 1.0
    return v


def make_track(tracker, x, descriptor, frames=3):
    """Feed one stationary target until confirmed; returns its Track."""
    for _ in range(frames):
        tracker.step([Detection(BoundingBox(x, 0.0, 40.0, 80.0), 1.0, descriptor)])
    return tracker.tracks[-1]


class TestGallery:
    def test_fifo_eviction(self):
        g = Gallery(budget=3, feature_dim=DIM)
        for axis in range(5):
            g.append(unit(axis))
        assert len(g) == 3
        assert np.array_equal(g.as_matrix(), np.stack([unit(2), unit(3), unit(4)]))

    def test_budget_property(self):
        assert Gallery(budget=7, feature_dim=DIM).budget == 7

    def test_empty_matrix_shape(self):
        assert Gallery(feature_dim=DIM).as_matrix().shape == (0, DIM)

    def test_dimension_check(self):
        g = Gallery(feature_dim=DIM)
        with pytest.raises(DimensionMismatchError):
            g.append(np.ones(DIM + 1))

    def test_invalid_budget(self):
        with pytest.raises(ValueError):
            Gallery(budget=0)


class TestCosineGalleryDistance:
    def test_minimum_over_gallery(self):
        g = Gallery(feature_dim=DIM)
        g.append(unit(0))
        g.append(unit(1))
        r = normalize_descriptor(unit(0) + 0.5 * unit(1))
        expected = min(1.0 - r[0], 1.0 - r[1])
        assert cosine_gallery_distance(g, r) == pytest.approx(expected, abs=1e-12)

    def test_identical_descriptor_is_zero(self):
        g = Gallery(feature_dim=DIM)
        g.append(unit(3))
        assert cosine_gallery_distance(g, unit(3)) == pytest.approx(0.0, abs=1e-12)

    def test_opposite_descriptor_is_two(self):
        g = Gallery(feature_dim=DIM)
        g.append(unit(3))
        assert cosine_gallery_distance(g, -unit(3)) == pytest.approx(2.0, abs=1e-12)

    def test_empty_gallery(self):
        with pytest.raises(EmptyGalleryError):
            cosine_gallery_distance(Gallery(feature_dim=DIM), unit(0))

    def test_dimension_check(self):
        g = Gallery(feature_dim=DIM)
        g.append(unit(0))
        with pytest.raises(DimensionMismatchError):
            cosine_gallery_distance(g, np.ones(DIM + 2))

    @given(
        st.lists(
            st.lists(st.floats(-1, 1), min_size=DIM, max_size=DIM),
            min_size=1,
            max_size=4,
        ),
        st.lists(st.floats(-1, 1), min_size=DIM, max_size=DIM),
    )
    @settings(max_examples=60, deadline=None)
    def test_equals_half_squared_euclidean(self, rows, query):
        # for unit vectors, 1 - a.b == |a - b|^2 / 2
        rows = [np.asarray(r) for r in rows if np.linalg.norm(r) > 1e-3]
        query = np.asarray(query)
        if not rows or np.linalg.norm(query) <= 1e-3:
            return
        g = Gallery(feature_dim=DIM)
        units = [normalize_descriptor(r) for r in rows]
        for u in units:
            g.append(u)
        q = normalize_descriptor(query)
        expected = min(np.sum((u - q) ** 2) / 2.0 for u in units)
        assert cosine_gallery_distance(g, q) == pytest.approx(expected, abs=1e-9)


class TestCombinedCost:
    CFG = TrackerConfig(motion_weight=0.5)

    @pytest.mark.parametrize(
        "d1,d2,admissible",
        [
            (1.0, 0.1, True),
            (9.4877, 0.2, True),  # gates are inclusive
            (9.4878, 0.1, False),
            (1.0, 0.21, False),
            (100.0, 1.0, False),
        ],
    )
    def test_gate_truth_table(self, d1, d2, admissible):
        assert combined_cost(d1, d2, self.CFG)[1] is admissible

    def test_blend(self):
        cost, _ = combined_cost(4.0, 0.1, self.CFG)
        assert cost == pytest.approx(0.5 * 4.0 + 0.5 * 0.1)

    def test_pure_appearance_cost_still_motion_gated(self):
        cfg = TrackerConfig(motion_weight=0.0)
        cost, admissible = combined_cost(50.0, 0.05, cfg)
        assert cost == pytest.approx(0.05)
        assert not admissible

    def test_pure_motion_cost(self):
        cfg = TrackerConfig(motion_weight=1.0)
        assert combined_cost(3.0, 0.1, cfg)[0] == pytest.approx(3.0)


class TestMatrixHelpers:
    def test_appearance_matrix_matches_scalar(self):
        rng = np.random.default_rng(2)
        galleries = []
        for k in range(3):
            g = Gallery(feature_dim=DIM)
            for _ in range(k + 1):
                g.append(normalize_descriptor(rng.normal(size=DIM)))
            galleries.append(g)
        descriptors = np.stack(
            [normalize_descriptor(rng.normal(size=DIM)) for _ in range(4)]
        )
        got = appearance_cost_matrix(galleries, descriptors)
        assert got.shape == (3, 4)
        for i, g in enumerate(galleries):
            for j in range(4):
                assert got[i, j] == pytest.approx(
                    cosine_gallery_distance(g, descriptors[j]), abs=1e-12
                )

    def test_motion_matrix_matches_gating_distance(self):
        kf = KalmanFilter()
        rng = np.random.default_rng(4)
        states = [
            kf.predict(kf.initiate(np.array([x, 0.0, 0.5, 60.0])))
            for x in (0.0, 30.0)
        ]
        zs = rng.uniform([0, -5, 0.4, 50], [40, 5, 0.6, 70], size=(5, 4))
        got = motion_cost_matrix(kf, states, zs)
        for t, state in enumerate(states):
            assert np.allclose(got[t], kf.gating_distance(state, zs), atol=1e-12)

    def test_empty_inputs(self):
        assert appearance_cost_matrix([], np.zeros((3, DIM))).shape == (0, 3)
        assert motion_cost_matrix(KalmanFilter(), [], np.zeros((2, 4))).shape == (0, 2)

    def test_iou_distance_values(self):
        a = np.array([[0.0, 0.0, 10.0, 10.0]])
        b = np.array([[0.0, 0.0, 10.0, 10.0], [5.0, 0.0, 10.0, 10.0]])
        got = iou_distance(a, b)
        assert got[0, 0] == pytest.approx(0.0)
        assert got[0, 1] == pytest.approx(1.0 - 50.0 / 150.0)


class TestBuildCostMatrices:
    def test_sentinel_on_gated_pairs(self):
        cfg = TrackerConfig(feature_dim=DIM)
        tracker = Tracker(cfg)
        track = make_track(tracker, 0.0, unit(0))
        track.predict(tracker.kf)
        detections = [
            Detection(BoundingBox(0.0, 0.0, 40.0, 80.0), 1.0, unit(0)),  # match
            Detection(BoundingBox(0.0, 0.0, 40.0, 80.0), 1.0, unit(1)),  # appearance-gated
            Detection(BoundingBox(900.0, 0.0, 40.0, 80.0), 1.0, unit(0)),  # motion-gated
        ]
        cm = build_cost_matrices(tracker.tracks, detections, cfg, tracker.kf)
        assert cm.admissible.tolist() == [[True, False, False]]
        assert cm.cost[0, 0] == pytest.approx(0.0, abs=1e-9)
        assert cm.cost[0, 1] == GATING_COST
        assert cm.cost[0, 2] == GATING_COST

    def test_motion_gate_closed_at_any_height(self):
        # a detection far outside the validation region stays inadmissible
        # across two orders of magnitude of box height
        cfg = TrackerConfig(feature_dim=DIM)
        for h in np.geomspace(10.0, 1000.0, 100):
            kf = KalmanFilter()
            tracker = Tracker(cfg)
            w = 0.5 * h
            tracker.step([Detection(BoundingBox(0.0, 0.0, w, h), 1.0, unit(0))])
            track = tracker.tracks[0]
            track.predict(kf)
            far = Detection(BoundingBox(0.0, 200.0 * h, w, h), 1.0, unit(0))
            cm = build_cost_matrices([track], [far], cfg, kf)
            assert not cm.admissible[0, 0]
            assert cm.cost[0, 0] == GATING_COST

    def test_empty_tracks_or_detections(self):
        cfg = TrackerConfig(feature_dim=DIM)
        cm = build_cost_matrices([], [], cfg)
        assert cm.cost.shape == (0, 0) and cm.admissible.shape == (0, 0)
        d = Detection(BoundingBox(0, 0, 1, 2), 1.0, unit(0))
        cm = build_cost_matrices([], [d], cfg)
        assert cm.cost.shape == (0, 1)
        assert cm.admissible.all()

    def test_empty_gallery_raises_with_track_id(self):
        cfg = TrackerConfig(feature_dim=DIM)
        tracker = Tracker(cfg)
        tracker.step([Detection(BoundingBox(0, 0, 40, 80), 1.0)])  # no descriptor
        track = tracker.tracks[0]
        d = Detection(BoundingBox(0, 0, 40, 80), 1.0, unit(0))
        with pytest.raises(EmptyGalleryError, match=f"track {track.track_id}"):
            build_cost_matrices([track], [d], cfg, tracker.kf)

    def test_missing_descriptor_raises_with_index(self):
        cfg = TrackerConfig(feature_dim=DIM)
        tracker = Tracker(cfg)
        track = make_track(tracker, 0.0, unit(0))
        good = Detection(BoundingBox(0, 0, 40, 80), 1.0, unit(0))
        bare = Detection(BoundingBox(0, 0, 40, 80), 1.0)
        with pytest.raises(MissingDescriptorError, match="detection 1"):
            build_cost_matrices([track], [good, bare], cfg, tracker.kf)

    def test_feature_dim_mismatch(self):
        cfg = TrackerConfig(feature_dim=DIM + 1)
        tracker = Tracker(TrackerConfig(feature_dim=DIM))
        track = make_track(tracker, 0.0, unit(0))
        d = Detection(BoundingBox(0, 0, 40, 80), 1.0, unit(0))
        with pytest.raises(DimensionMismatchError):
            build_cost_matrices([track], [d], cfg, tracker.kf)


class TestIouCostMatrix:
    def test_gate_and_sentinel(self):
        cfg = TrackerConfig(iou_max_cost=0.7, feature_dim=DIM)
        tracker = Tracker(cfg)
        tracker.step([Detection(BoundingBox(0.0, 0.0, 10.0, 10.0), 1.0)])
        track = tracker.tracks[0]
        detections = [
            Detection(BoundingBox(0.0, 0.0, 10.0, 10.0), 1.0),
            Detection(BoundingBox(50.0, 50.0, 10.0, 10.0), 1.0),
        ]
        cm = iou_cost_matrix([track], detections, cfg)
        assert cm.admissible.tolist() == [[True, False]]
        assert cm.cost[0, 0] == pytest.approx(0.0, abs=1e-9)
        assert cm.cost[0, 1] == GATING_COST

    def test_empty(self):
        cfg = TrackerConfig()
        cm = iou_cost_matrix([], [], cfg)
        assert cm.cost.shape == (0, 0)


class TestCostMatricesType:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionMismatchError):
            association.CostMatrices(np.zeros((2, 2)), np.ones((2, 3), dtype=bool))
