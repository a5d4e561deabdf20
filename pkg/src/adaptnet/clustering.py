"""Trajectory clustering under the Frechet metric.

Frechet space has no usable mean, so clusters are represented by medoids
(k-medoids, PAM-style swap descent).  The "centroids" reported alongside
are purely cosmetic spatial means of member points, for map display.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .trajectory import Point, Trajectory, discrete_frechet


@dataclass
class DistanceMatrix:
    """Symmetric pairwise distance cache with zero diagonal."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.n, self.n):
            raise ValueError("values must be an n x n matrix")
        if np.any(v < 0):
            raise ValueError("distances must be non-negative")
        if np.any(np.diag(v) != 0):
            raise ValueError("diagonal must be zero")
        if not np.array_equal(v, v.T):
            raise ValueError("matrix must be symmetric")
        self.values = v


@dataclass
class Clustering:
    """Assignment of n items to k medoid-represented clusters.

    centroids (display-only spatial means) are filled in by
    cluster_report, which is the only place with access to the actual
    trajectories; a freshly fitted Clustering carries None there.
    """

    k: int
    assignment: np.ndarray
    medoids: np.ndarray
    centroids: Optional[list] = field(default=None)

    def cost(self, matrix: DistanceMatrix) -> float:
        return float(
            matrix.values[np.arange(len(self.assignment)), self.medoids[self.assignment]].sum()
        )


def pairwise_frechet(trajectories) -> DistanceMatrix:
    """Full symmetric matrix of discrete Frechet distances."""
    if not trajectories:
        raise ValueError("need at least one trajectory")
    n = len(trajectories)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = discrete_frechet(trajectories[i], trajectories[j])
            values[i, j] = d
            values[j, i] = d
    return DistanceMatrix(n=n, values=values)


def _assign(values, medoids):
    # nearest medoid per item; np.argmin breaks ties toward the earlier
    # entry, and medoids are kept sorted, so ties go to the lowest medoid
    # index; medoids always claim themselves even under duplicate rows
    assignment = np.argmin(values[:, medoids], axis=1)
    for c, m in enumerate(medoids):
        assignment[m] = c
    return assignment


def _cost(values, medoids):
    return float(np.min(values[:, medoids], axis=1).sum())


def _build_init(values, k):
    # classic PAM BUILD: start from the 1-medoid optimum, then greedily
    # add whichever point lowers total cost most
    chosen = [int(np.argmin(values.sum(axis=1)))]
    nearest = values[chosen[0]].copy()
    while len(chosen) < k:
        costs = np.minimum(values, nearest[None, :]).sum(axis=1)
        costs[chosen] = np.inf
        h = int(np.argmin(costs))
        chosen.append(h)
        nearest = np.minimum(nearest, values[h])
    return np.sort(np.asarray(chosen))


def k_medoids(matrix: DistanceMatrix, k: int, seed: int) -> Clustering:
    """PAM: greedy BUILD init, then best-improvement swap descent to a
    local optimum where no single medoid replacement lowers total cost.

    Deterministic given (matrix, k, seed); all ties break to the lowest
    index.  Two extra seeded random restarts guard against the poor
    local optima the greedy init can occasionally land in.
    """
    n = matrix.n
    if k < 1 or k > n:
        raise ValueError("k must satisfy 1 <= k <= n, got k=%d n=%d" % (k, n))
    values = matrix.values
    rng = np.random.default_rng(seed)

    def _descend(medoids):
        cost = _cost(values, medoids)
        improved = True
        while improved:
            improved = False
            best_swap = None
            best_delta = -1e-12
            in_set = np.zeros(n, dtype=bool)
            in_set[medoids] = True
            for mi in range(k):
                for h in range(n):
                    if in_set[h]:
                        continue
                    cand = medoids.copy()
                    cand[mi] = h
                    delta = _cost(values, cand) - cost
                    if delta < best_delta:
                        best_delta = delta
                        best_swap = (mi, h)
            if best_swap is not None:
                mi, h = best_swap
                medoids[mi] = h
                medoids = np.sort(medoids)
                cost += best_delta
                improved = True
        return medoids, _cost(values, medoids)

    inits = [_build_init(values, k)]
    inits += [np.sort(rng.choice(n, size=k, replace=False)) for _ in range(2)]
    best_medoids = None
    best_cost = np.inf
    for init in inits:
        medoids, cost = _descend(init)
        if best_medoids is None or cost < best_cost - 1e-12:
            best_cost = cost
            best_medoids = medoids
    assignment = _assign(values, best_medoids)
    return Clustering(k=k, assignment=assignment, medoids=best_medoids)


def cluster_report(clustering: Clustering, trajectories):
    """Per-cluster summary: (cluster id, size, centroid Point, medoid index).

    The centroid is the arithmetic mean of every member trajectory's
    points, pooled; its timestamp is the pooled mean time.  Also fills
    clustering.centroids in place for reuse.
    """
    n = len(trajectories)
    if len(clustering.assignment) != n:
        raise ValueError("clustering was fitted on a different trajectory count")
    report = []
    centroids = []
    for c in range(clustering.k):
        members = np.nonzero(clustering.assignment == c)[0]
        pooled = np.concatenate([trajectories[i].points for i in members], axis=0)
        mean = pooled.mean(axis=0)
        centroid = Point(float(mean[0]), float(mean[1]), float(mean[2]))
        centroids.append(centroid)
        report.append((c, int(len(members)), centroid, int(clustering.medoids[c])))
    clustering.centroids = centroids
    return report


def silhouette_score(matrix: DistanceMatrix, clustering: Clustering) -> float:
    """Mean silhouette over all items (reporting aid, never used to pick k).

    Singleton clusters score 0 by convention.
    """
    values = matrix.values
    assignment = clustering.assignment
    n = matrix.n
    if clustering.k == 1:
        return 0.0
    scores = np.zeros(n)
    for i in range(n):
        own = assignment[i]
        same = np.nonzero(assignment == own)[0]
        if len(same) == 1:
            scores[i] = 0.0
            continue
        a = values[i, same[same != i]].mean()
        b = np.inf
        for c in range(clustering.k):
            if c == own:
                continue
            other = np.nonzero(assignment == c)[0]
            if len(other) == 0:
                continue
            m = values[i, other].mean()
            if m < b:
                b = m
        scores[i] = (b - a) / max(a, b) if max(a, b) > 0 else 0.0
    return float(scores.mean())


def write_clusters_csv(path, clustering: Clustering, trajectories):
    """clusters.csv: one row per trajectory with its cluster's summary."""
    import csv

    report = cluster_report(clustering, trajectories)
    by_cluster = {row[0]: row for row in report}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["traj_id", "cluster", "medoid", "centroid_x", "centroid_y"])
        for i, traj in enumerate(trajectories):
            c = int(clustering.assignment[i])
            _, _, centroid, medoid_idx = by_cluster[c]
            medoid_label = trajectories[medoid_idx].label
            if medoid_label is None:
                medoid_label = str(medoid_idx)
            label = traj.label if traj.label is not None else str(i)
            writer.writerow(
                [label, c, medoid_label, repr(centroid.x), repr(centroid.y)]
            )
