import numpy as np
import pytest

from adaptnet.clustering import (
    Clustering,
    DistanceMatrix,
    cluster_report,
    k_medoids,
    pairwise_frechet,
    silhouette_score,
    write_clusters_csv,
)
from adaptnet.trajectory import Trajectory

from oracles import medoid_cost_bruteforce


def _random_matrix(rng, n):
    pts = rng.uniform(0, 100, (n, 2))
    d = np.hypot(pts[:, 0:1] - pts[None, :, 0], pts[:, 1:2] - pts[None, :, 1])
    return DistanceMatrix(n=n, values=d)


def _traj(xy):
    xy = np.asarray(xy, dtype=float)
    return Trajectory(np.column_stack([xy, np.arange(len(xy), dtype=float)]))


class TestDistanceMatrix:
    def test_validation(self):
        with pytest.raises(ValueError, match="n x n"):
            DistanceMatrix(n=2, values=np.zeros((2, 3)))
        with pytest.raises(ValueError, match="non-negative"):
            DistanceMatrix(n=2, values=np.array([[0.0, -1.0], [-1.0, 0.0]]))
        with pytest.raises(ValueError, match="diagonal"):
            DistanceMatrix(n=2, values=np.array([[1.0, 2.0], [2.0, 0.0]]))
        with pytest.raises(ValueError, match="symmetric"):
            DistanceMatrix(n=2, values=np.array([[0.0, 2.0], [3.0, 0.0]]))


class TestKMedoids:
    def test_k_bounds(self):
        m = _random_matrix(np.random.default_rng(0), 4)
        with pytest.raises(ValueError):
            k_medoids(m, 0, seed=1)
        with pytest.raises(ValueError):
            k_medoids(m, 5, seed=1)

    def test_deterministic_given_seed(self):
        m = _random_matrix(np.random.default_rng(1), 9)
        a = k_medoids(m, 3, seed=77)
        b = k_medoids(m, 3, seed=77)
        assert np.array_equal(a.medoids, b.medoids)
        assert np.array_equal(a.assignment, b.assignment)

    def test_k_equals_n_zero_cost(self):
        m = _random_matrix(np.random.default_rng(2), 5)
        c = k_medoids(m, 5, seed=0)
        assert c.cost(m) == 0.0

    def test_medoids_claim_themselves(self):
        m = _random_matrix(np.random.default_rng(3), 8)
        c = k_medoids(m, 3, seed=5)
        for ci, mi in enumerate(c.medoids):
            assert c.assignment[mi] == ci

    def test_near_optimal_on_small_instances(self):
        rng = np.random.default_rng(900)
        optimal = 0
        total = 0
        for _ in range(60):
            n = int(rng.integers(4, 9))
            k = int(rng.integers(1, 4))
            m = _random_matrix(rng, n)
            got = k_medoids(m, k, seed=int(rng.integers(1 << 30))).cost(m)
            want = medoid_cost_bruteforce(m.values, k)
            assert got <= want * 1.05 + 1e-9  # never far from optimal
            total += 1
            if got <= want + 1e-9:
                optimal += 1
        assert optimal / total >= 0.9


class TestReportAndScores:
    def test_cluster_report_pooled_centroid(self):
        trajs = [_traj([[0, 0], [2, 0]]), _traj([[10, 10], [12, 10]])]
        m = pairwise_frechet(trajs)
        c = k_medoids(m, 2, seed=0)
        report = cluster_report(c, trajs)
        assert len(report) == 2
        for cid, size, centroid, medoid_idx in report:
            members = np.nonzero(c.assignment == cid)[0]
            pooled = np.concatenate([trajs[i].points for i in members])
            assert centroid.x == pytest.approx(pooled[:, 0].mean())
            assert centroid.y == pytest.approx(pooled[:, 1].mean())
            assert size == len(members)
        assert c.centroids is not None and len(c.centroids) == 2

    def test_report_rejects_foreign_clustering(self):
        trajs = [_traj([[0, 0], [1, 0]])]
        c = Clustering(k=1, assignment=np.zeros(3, dtype=int), medoids=np.array([0]))
        with pytest.raises(ValueError):
            cluster_report(c, trajs)

    def test_silhouette_separated_clusters_high(self):
        trajs = [
            _traj([[0, 0], [1, 0]]),
            _traj([[0, 1], [1, 1]]),
            _traj([[100, 100], [101, 100]]),
            _traj([[100, 101], [101, 101]]),
        ]
        m = pairwise_frechet(trajs)
        c = k_medoids(m, 2, seed=0)
        assert silhouette_score(m, c) > 0.9

    def test_silhouette_k1_zero(self):
        trajs = [_traj([[0, 0], [1, 0]]), _traj([[5, 5], [6, 5]])]
        m = pairwise_frechet(trajs)
        assert silhouette_score(m, k_medoids(m, 1, seed=0)) == 0.0

    def test_pairwise_frechet_shape(self):
        trajs = [_traj([[0, 0], [1, 0]]), _traj([[0, 3], [1, 3]])]
        m = pairwise_frechet(trajs)
        assert m.values[0, 1] == pytest.approx(3.0)
        with pytest.raises(ValueError):
            pairwise_frechet([])

    def test_clusters_csv(self, tmp_path):
        trajs = [
            Trajectory([[0, 0, 0.0], [1, 0, 1.0]], label="a"),
            Trajectory([[9, 9, 0.0], [9, 10, 1.0]], label="b"),
        ]
        m = pairwise_frechet(trajs)
        c = k_medoids(m, 2, seed=0)
        path = tmp_path / "clusters.csv"
        write_clusters_csv(path, c, trajs)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "traj_id,cluster,medoid,centroid_x,centroid_y"
        assert len(lines) == 3
