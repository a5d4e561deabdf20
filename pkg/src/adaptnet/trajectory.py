"""Timestamped 2-D trajectories, discrete Frechet distance, and relevance.

A trajectory is an ordered sequence of (x, y, t) samples with strictly
increasing t.  Similarity between trajectories is the discrete Frechet
distance on the (x, y) projection: the minimum over all monotone couplings
of the two point sequences of the maximum paired Euclidean distance.  Time
enters only through sequence order, never through timestamp magnitude.

Relevance of newly sensed data is the distance to the nearest reference
pattern after both curves are resampled to a common length; data within
the threshold is considered redundant (not novel).
"""

from dataclasses import dataclass

import numpy as np

from .kernels import frechet_distance


@dataclass(frozen=True)
class Point:
    """One trajectory sample: planar position plus timestamp."""

    x: float
    y: float
    t: float


class Trajectory:
    """Ordered (x, y, t) samples with strictly increasing timestamps.

    Stored as a float64 array of shape (n, 3).  Monotonicity is validated
    once at construction so downstream code can assume it.
    """

    def __init__(self, points, label=None):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must be an (n, 3) array of (x, y, t)")
        if pts.shape[0] < 1:
            raise ValueError("trajectory needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("trajectory points must be finite")
        t = pts[:, 2]
        if pts.shape[0] > 1 and not np.all(np.diff(t) > 0):
            raise ValueError(
                "timestamps must be strictly increasing (trajectory %r)" % (label,)
            )
        self.points = pts
        self.label = label

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return "Trajectory(label=%r, n=%d)" % (self.label, len(self))

    @property
    def xy(self):
        return self.points[:, :2]

    @property
    def t(self):
        return self.points[:, 2]

    def point(self, i) -> Point:
        x, y, t = self.points[i]
        return Point(float(x), float(y), float(t))

    def duration(self) -> float:
        return float(self.points[-1, 2] - self.points[0, 2])

    def arc_length(self) -> float:
        if len(self) < 2:
            return 0.0
        seg = np.diff(self.xy, axis=0)
        return float(np.sum(np.hypot(seg[:, 0], seg[:, 1])))


@dataclass(frozen=True)
class RelevanceScore:
    """Distance to the best-matching reference and the novelty verdict.

    is_novel is True only when distance strictly exceeds the threshold in
    force at evaluation time; a distance equal to the threshold counts as
    redundant.
    """

    distance: float
    is_novel: bool


def _as_xy(obj):
    if isinstance(obj, Trajectory):
        return obj.xy
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise ValueError("expected a Trajectory or an (n, >=2) array")
    return arr[:, :2]


def discrete_frechet(a, b) -> float:
    """Discrete Frechet distance between two non-empty curves.

    Symmetric, non-negative, zero iff the (x, y) projections are
    identical point sequences.  Single-point curves are legal and reduce
    to a max-min point-to-curve distance.
    """
    axy = _as_xy(a)
    bxy = _as_xy(b)
    if axy.shape[0] == 0 or bxy.shape[0] == 0:
        raise ValueError("cannot compare an empty trajectory")
    return float(
        frechet_distance(np.ascontiguousarray(axy), np.ascontiguousarray(bxy))
    )


def resample_uniform(traj: Trajectory, n: int) -> Trajectory:
    """Resample a trajectory to n points equally spaced in arc length.

    Endpoints are preserved exactly and timestamps are interpolated along
    the same arc-length parameter.  A spatially degenerate trajectory
    (zero total arc length) falls back to uniform-in-time spacing so the
    output is always a valid n-point trajectory.
    """
    if n < 2:
        raise ValueError("need at least 2 output points")
    if len(traj) < 2:
        raise ValueError("cannot resample a trajectory with fewer than 2 points")
    pts = traj.points
    seg = np.diff(pts[:, :2], axis=0)
    s = np.concatenate([[0.0], np.cumsum(np.hypot(seg[:, 0], seg[:, 1]))])
    if s[-1] <= 0.0:
        s = pts[:, 2] - pts[0, 2]
    u = np.linspace(0.0, s[-1], n)
    x = np.interp(u, s, pts[:, 0])
    y = np.interp(u, s, pts[:, 1])
    t = np.interp(u, s, pts[:, 2])
    x[0], y[0], t[0] = pts[0, 0], pts[0, 1], pts[0, 2]
    x[-1], y[-1], t[-1] = pts[-1, 0], pts[-1, 1], pts[-1, 2]
    # dwell segments collapse arc length, which can tie interpolated
    # timestamps; nudge forward to keep t strictly increasing
    eps = 1e-9 * max(1.0, abs(float(pts[-1, 2])))
    for i in range(1, n):
        if t[i] <= t[i - 1]:
            t[i] = t[i - 1] + eps
    return Trajectory(np.column_stack([x, y, t]), label=traj.label)


def relevance_score(new_data, references, threshold, comparison_length=32):
    """Score newly sensed data against a set of reference patterns.

    Both the new curve and every reference are resampled to
    comparison_length points so distances are comparable across tracks
    with different sampling rates.  distance is the minimum Frechet
    distance over the references; is_novel is True when it strictly
    exceeds the threshold.
    """
    if not references:
        raise ValueError("reference set must be non-empty")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    probe = resample_uniform(new_data, comparison_length)
    best = np.inf
    for ref in references:
        d = discrete_frechet(probe, resample_uniform(ref, comparison_length))
        if d < best:
            best = d
    return RelevanceScore(distance=float(best), is_novel=bool(best > threshold))


def load_trajectories_csv(path):
    """Read ``id,x,y,t`` rows into Trajectory objects, one per id.

    Rows must be grouped by id and sorted by t within each id; any
    non-monotone timestamp is rejected rather than silently reordered.
    Returns trajectories ordered by first appearance of each id.
    """
    import csv

    groups = {}
    order = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"id", "x", "y", "t"}
        if reader.fieldnames is None or not need.issubset(reader.fieldnames):
            raise ValueError("trajectory CSV must have header id,x,y,t")
        for row in reader:
            tid = row["id"]
            if tid not in groups:
                groups[tid] = []
                order.append(tid)
            groups[tid].append((float(row["x"]), float(row["y"]), float(row["t"])))
    out = []
    for tid in order:
        pts = np.asarray(groups[tid], dtype=np.float64)
        if pts.shape[0] > 1 and not np.all(np.diff(pts[:, 2]) > 0):
            raise ValueError("non-monotone timestamps for id %r" % tid)
        out.append(Trajectory(pts, label=tid))
    return out


def save_trajectories_csv(path, trajectories):
    """Write trajectories as ``id,x,y,t`` rows, grouped by trajectory."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x", "y", "t"])
        for k, traj in enumerate(trajectories):
            label = traj.label if traj.label is not None else str(k)
            for x, y, t in traj.points:
                writer.writerow([label, repr(float(x)), repr(float(y)), repr(float(t))])
