"""Radar-abstracted sensing: duty-cycled scans, track maintenance, and the
pipeline from raw detections to Frechet-scored, prioritized tracks.

Frequency-hopping radar is reduced to a duty cycle (active emission for a
fraction of each PRI, then silence) plus an SNR factor; no hop patterns or
interference are modeled.
"""

from dataclasses import dataclass, field

import numpy as np

from .trajectory import Point, Trajectory, relevance_score
from .world import RadarState, Uav, World  # noqa: F401  (RadarState re-export)


@dataclass(frozen=True)
class Detection:
    """One radar return.  target_id is ground truth kept for scoring and
    logs only; policies never see it."""

    target_id: int
    measured: Point
    snr: float
    time: float


class Track:
    def __init__(self, track_id, detection: Detection):
        self.track_id = track_id
        self._pts = [(detection.measured.x, detection.measured.y, detection.time)]
        self.last_update = detection.time
        self.relevance = None

    def __len__(self):
        return len(self._pts)

    def append(self, detection: Detection):
        self._pts.append((detection.measured.x, detection.measured.y, detection.time))
        self.last_update = detection.time

    def last_point(self):
        return self._pts[-1]

    def to_trajectory(self) -> Trajectory:
        return Trajectory(np.asarray(self._pts), label="trk%d" % self.track_id)


@dataclass
class TrackParams:
    gate_radius: float = 25.0
    t_stale: float = 5.0
    now: float = 0.0
    next_id: int = 0


def snr_factor(snr_db, snr_floor=0.0, snr_ref=20.0):
    return min(max((snr_db - snr_floor) / (snr_ref - snr_floor), 0.0), 1.0)


def radar_scan(uav: Uav, world: World, snr_floor=0.0, snr_ref=20.0):
    """Scan once at the current world time.

    Silent window: returns [] without consuming any randomness.  Active
    window: for every target (in id order) draw one detection coin and a
    2-D noise vector from this UAV's substream, whether or not the target
    is in range, so the stream replays identically across scenarios.
    Detection probability is clamp(1 - (r/r_max)^2, 0, 1) scaled by the
    SNR factor; measurements get N(0, sigma^2) per-axis noise.
    """
    if not uav.active:
        return []
    if not uav.radar.is_active(world.time):
        return []
    rng = world.uav_rngs[uav.id]
    snr = world.env.snr_base - world.env.snr_weather_penalty
    factor = snr_factor(snr, snr_floor, snr_ref)
    sigma = world.env.sensor_noise_sigma
    out = []
    rmax = uav.radar.range_max
    for tgt in world.targets:
        coin = rng.random()
        noise = rng.standard_normal(2)
        r = np.hypot(tgt.x - uav.x, tgt.y - uav.y)
        if r > rmax:
            continue
        p_d = max(0.0, 1.0 - (r / rmax) ** 2) * factor
        if coin < p_d:
            measured = Point(
                float(tgt.x + noise[0] * sigma),
                float(tgt.y + noise[1] * sigma),
                world.time,
            )
            out.append(Detection(tgt.id, measured, snr, world.time))
    return out


def update_tracks(tracks, detections, params: TrackParams):
    """Nearest-neighbor association with gating, then staleness retirement.

    Each detection joins the nearest track (ties to the lowest track_id)
    whose last point lies within the gate radius, else it founds a new
    track.  A track accepts at most one detection per timestep, which
    keeps its point timestamps strictly increasing.  Tracks silent for
    longer than t_stale are dropped.  params.next_id advances as new
    tracks are born.
    """
    live = [t for t in tracks if params.now - t.last_update <= params.t_stale]
    for det in detections:
        best = None
        best_d = np.inf
        for trk in live:
            if trk.last_update >= det.time:
                continue  # already extended this step
            x, y, _ = trk.last_point()
            d = np.hypot(det.measured.x - x, det.measured.y - y)
            if d > params.gate_radius:
                continue
            if best is None or d < best_d or (d == best_d and trk.track_id < best.track_id):
                best_d = d
                best = trk
        if best is not None:
            best.append(det)
        else:
            live.append(Track(params.next_id, det))
            params.next_id += 1
    return live


def sensing_pipeline(uav, tracks, references, threshold, comparison_length=32, min_points=4):
    """Score mature tracks against the reference patterns.

    Tracks shorter than min_points are skipped.  Returns (track, score)
    pairs sorted by distance descending, most novel first; equal
    distances order by track_id.  Scores are also stored on the tracks.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    scored = []
    for trk in tracks:
        if len(trk) < min_points:
            continue
        score = relevance_score(
            trk.to_trajectory(), references, threshold, comparison_length
        )
        trk.relevance = score
        scored.append((trk, score))
    scored.sort(key=lambda pair: (-pair[1].distance, pair[0].track_id))
    return scored


def plan_sensing_path(uav, report, paths):
    """Scripted policy: head for the largest cluster.

    Picks the path whose nearest waypoint minimizes the distance to the
    largest cluster's centroid.  Ties break to the lowest cluster id and
    then the lowest path index; an empty report falls back to path 0.
    """
    if not report:
        return 0
    best_cluster = max(report, key=lambda row: (row[1], -row[0]))
    centroid = best_cluster[2]
    best_path = 0
    best_d = np.inf
    for p, wps in enumerate(paths):
        d = float(np.min(np.hypot(wps[:, 0] - centroid.x, wps[:, 1] - centroid.y)))
        if d < best_d:
            best_d = d
            best_path = p
    return best_path


def write_detections_csv(path, rows):
    """rows: iterable of (time, uav_id, detection)."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "uav_id", "target_id", "mx", "my", "snr"])
        for time, uav_id, det in rows:
            writer.writerow(
                [
                    repr(float(time)),
                    uav_id,
                    det.target_id,
                    repr(float(det.measured.x)),
                    repr(float(det.measured.y)),
                    repr(float(det.snr)),
                ]
            )
