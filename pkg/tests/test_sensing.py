import numpy as np
import pytest

from adaptnet.config import load_config
from adaptnet.sensing import (
    Detection,
    Track,
    TrackParams,
    plan_sensing_path,
    radar_scan,
    sensing_pipeline,
    snr_factor,
    update_tracks,
    write_detections_csv,
)
from adaptnet.trajectory import Point, Trajectory
from adaptnet.world import init_world


def _world(**over):
    doc = {"uav_count": 1, "target_count": 3, "seed": 7}
    doc.update(over)
    return init_world(load_config(doc))


def _det(tid, x, y, t, snr=15.0):
    return Detection(tid, Point(x, y, t), snr, t)


class TestRadarScan:
    def test_inactive_uav_returns_nothing(self):
        w = _world()
        w.uavs[0].active = False
        assert radar_scan(w.uavs[0], w) == []

    def test_silent_window_consumes_no_randomness(self):
        w = _world(radar_active_fraction=0.5, radar_pri=2.0)
        w.time = 1.5  # silent half of the PRI
        before = w.uav_rngs[0].bit_generator.state
        assert radar_scan(w.uavs[0], w) == []
        assert w.uav_rngs[0].bit_generator.state == before

    def test_active_scan_draws_fixed_budget_per_target(self):
        # one coin + one 2-normal per target, in range or not
        a = _world(target_count=4, radar_range_max=1e-6)
        b = _world(target_count=4, radar_range_max=1e-6)
        assert radar_scan(a.uavs[0], a) == []
        for _ in range(4):
            b.uav_rngs[0].random()
            b.uav_rngs[0].standard_normal(2)
        assert a.uav_rngs[0].random() == b.uav_rngs[0].random()

    def test_zero_range_zero_noise_is_a_sure_clean_hit(self):
        w = _world(
            target_count=1,
            sensor_noise_sigma=0.0,
            snr_base=25.0,
            snr_weather_penalty=0.0,
            radar_range_max=1e9,
        )
        u, tgt = w.uavs[0], w.targets[0]
        tgt.x, tgt.y = u.x, u.y
        dets = radar_scan(u, w)
        assert len(dets) == 1
        d = dets[0]
        assert (d.measured.x, d.measured.y) == (u.x, u.y)
        assert d.target_id == 0 and d.time == w.time

    def test_out_of_range_never_detected(self):
        w = _world(target_count=1, radar_range_max=10.0)
        u, tgt = w.uavs[0], w.targets[0]
        tgt.x, tgt.y = u.x + 50.0, u.y
        for _ in range(50):
            assert radar_scan(u, w) == []

    def test_detection_rate_follows_range_falloff(self):
        # r = rmax / sqrt(2) halves p_d; full SNR keeps the factor at 1
        w = _world(
            target_count=1,
            snr_base=25.0,
            snr_weather_penalty=5.0,
            radar_range_max=100.0,
            radar_active_fraction=1.0,
        )
        u, tgt = w.uavs[0], w.targets[0]
        tgt.x, tgt.y = u.x + 100.0 / np.sqrt(2.0), u.y
        hits = sum(bool(radar_scan(u, w)) for _ in range(4000))
        assert abs(hits / 4000 - 0.5) < 0.04

    def test_snr_factor_scales_and_clamps(self):
        assert snr_factor(20.0) == 1.0
        assert snr_factor(10.0) == 0.5
        assert snr_factor(-3.0) == 0.0
        assert snr_factor(99.0) == 1.0


class TestTracks:
    def test_detection_founds_track_and_next_id_advances(self):
        params = TrackParams(now=0.0, next_id=5)
        tracks = update_tracks([], [_det(0, 10.0, 10.0, 0.0)], params)
        assert len(tracks) == 1
        assert tracks[0].track_id == 5
        assert params.next_id == 6

    def test_in_gate_detection_extends_nearest(self):
        params = TrackParams(gate_radius=25.0, now=1.0)
        t0 = Track(0, _det(0, 0.0, 0.0, 0.0))
        t1 = Track(1, _det(1, 40.0, 0.0, 0.0))
        tracks = update_tracks([t0, t1], [_det(0, 5.0, 0.0, 1.0)], params)
        assert len(tracks) == 2
        assert len(t0) == 2 and len(t1) == 1
        assert t0.last_point() == (5.0, 0.0, 1.0)

    def test_gate_tie_goes_to_lowest_id(self):
        params = TrackParams(gate_radius=25.0, now=1.0)
        t0 = Track(0, _det(0, -5.0, 0.0, 0.0))
        t1 = Track(1, _det(1, 5.0, 0.0, 0.0))
        update_tracks([t0, t1], [_det(0, 0.0, 0.0, 1.0)], params)
        assert len(t0) == 2 and len(t1) == 1

    def test_one_detection_per_track_per_step(self):
        params = TrackParams(gate_radius=25.0, now=1.0)
        t0 = Track(0, _det(0, 0.0, 0.0, 0.0))
        tracks = update_tracks(
            [t0], [_det(0, 1.0, 0.0, 1.0), _det(0, 2.0, 0.0, 1.0)], params
        )
        # second same-time return cannot reuse t0, so it founds a track
        assert len(t0) == 2
        assert len(tracks) == 2

    def test_out_of_gate_founds_new_track(self):
        params = TrackParams(gate_radius=25.0, now=1.0, next_id=1)
        t0 = Track(0, _det(0, 0.0, 0.0, 0.0))
        tracks = update_tracks([t0], [_det(0, 100.0, 0.0, 1.0)], params)
        assert len(tracks) == 2 and len(t0) == 1

    def test_stale_tracks_retire(self):
        params = TrackParams(t_stale=5.0, now=10.0)
        old = Track(0, _det(0, 0.0, 0.0, 0.0))
        fresh = Track(1, _det(1, 50.0, 0.0, 6.0))
        tracks = update_tracks([old, fresh], [], params)
        assert tracks == [fresh]

    def test_track_timestamps_stay_strictly_increasing(self):
        params = TrackParams(gate_radius=50.0)
        t0 = Track(0, _det(0, 0.0, 0.0, 0.0))
        for k in range(1, 6):
            params.now = float(k)
            update_tracks([t0], [_det(0, float(k), 0.0, float(k))], params)
        traj = t0.to_trajectory()
        assert np.all(np.diff(traj.t) > 0)
        assert traj.label == "trk0"


class TestPipeline:
    def _track_along(self, tid, xs, y=0.0):
        trk = Track(tid, _det(0, xs[0], y, 0.0))
        for k, x in enumerate(xs[1:], start=1):
            trk.append(_det(0, x, y, float(k)))
        return trk

    def test_threshold_must_be_positive(self):
        with pytest.raises(ValueError, match="threshold"):
            sensing_pipeline(None, [], [Trajectory(np.array([[0.0, 0.0, 0.0]]))], 0.0)

    def test_short_tracks_skipped_and_order_most_novel_first(self):
        ref = Trajectory(np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 1.0]]))
        near = self._track_along(0, [0.0, 1.0, 2.0, 3.0])
        far = self._track_along(1, [0.0, 1.0, 2.0, 3.0], y=50.0)
        short = self._track_along(2, [0.0, 1.0])
        out = sensing_pipeline(None, [near, far, short], [ref], 10.0, min_points=4)
        assert [trk.track_id for trk, _ in out] == [1, 0]
        assert out[0][1].is_novel and not out[1][1].is_novel
        assert far.relevance is out[0][1]
        assert short.relevance is None

    def test_equal_distance_orders_by_track_id(self):
        ref = Trajectory(np.array([[0.0, 0.0, 0.0], [3.0, 0.0, 1.0]]))
        a = self._track_along(3, [0.0, 1.0, 2.0, 3.0], y=20.0)
        b = self._track_along(1, [0.0, 1.0, 2.0, 3.0], y=20.0)
        out = sensing_pipeline(None, [a, b], [ref], 5.0, min_points=4)
        assert [trk.track_id for trk, _ in out] == [1, 3]


class TestPathPlanner:
    def test_empty_report_falls_back_to_path_zero(self):
        assert plan_sensing_path(None, [], [np.array([[0.0, 0.0]])]) == 0

    def test_largest_cluster_steers_to_nearest_path(self):
        paths = [
            np.array([[0.0, 100.0], [10.0, 100.0]]),
            np.array([[0.0, 900.0], [10.0, 900.0]]),
        ]
        report = [
            (0, 2, Point(5.0, 880.0, 0.0), 0),
            (1, 7, Point(5.0, 880.0, 0.0), 1),
        ]
        assert plan_sensing_path(None, report, paths) == 1
        report = [
            (0, 7, Point(5.0, 120.0, 0.0), 0),
            (1, 2, Point(5.0, 880.0, 0.0), 1),
        ]
        assert plan_sensing_path(None, report, paths) == 0

    def test_size_tie_prefers_lowest_cluster_id(self):
        paths = [
            np.array([[0.0, 100.0]]),
            np.array([[0.0, 900.0]]),
        ]
        report = [
            (0, 3, Point(0.0, 120.0, 0.0), 0),
            (1, 3, Point(0.0, 880.0, 0.0), 1),
        ]
        assert plan_sensing_path(None, report, paths) == 0


class TestDetectionsCsv:
    def test_header_and_repr_floats(self, tmp_path):
        p = tmp_path / "det.csv"
        write_detections_csv(p, [(0.5, 1, _det(3, 1.25, -2.5, 0.5, snr=12.0))])
        lines = p.read_text().splitlines()
        assert lines[0] == "time,uav_id,target_id,mx,my,snr"
        assert lines[1] == "0.5,1,3,1.25,-2.5,12.0"
