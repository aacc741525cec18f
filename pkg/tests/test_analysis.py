from collections import deque

import numpy as np
import pytest

from scipy.spatial import ConvexHull

from qclscape.errors import InvalidArgumentError
from qclscape.models import OverlapSpec
from qclscape.tasks.analysis import (
    CDI_TABLE_HEADER, NOISE, cdi_table, cluster_area, cluster_density_index, dbscan, overlap_counts,
)

UNIT_SQUARE_MEAN_DISTANCE = 0.5214


def reference_dbscan(points, eps, min_pts):
    """Quadratic-time DBSCAN on a dense distance matrix."""
    n = len(points)
    distances = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2))
    neighbors = [np.flatnonzero(row <= eps) for row in distances]
    core = np.array([len(found) >= min_pts for found in neighbors])
    labels = np.full(n, -2)
    cluster = 0
    for i in range(n):
        if labels[i] != -2 or not core[i]:
            continue
        labels[i] = cluster
        queue = deque([i])
        while queue:
            j = queue.popleft()
            if not core[j]:
                continue
            for k in neighbors[j]:
                if labels[k] < 0:
                    labels[k] = cluster
                    queue.append(k)
        cluster += 1
    labels[labels == -2] = NOISE
    return labels, core


def core_partition(labels, core):
    groups = {}
    for index in np.flatnonzero(core):
        groups.setdefault(labels[index], []).append(index)
    return sorted(tuple(sorted(group)) for group in groups.values())


def test_identical_points_overlap():
    groups = overlap_counts([[0.1, 0.2, 0.97], [0.1, 0.2, 0.97]])
    assert len(groups) == 1
    assert groups[0].count == 2
    assert (groups[0].x, groups[0].y) == pytest.approx((0.1, 0.2))


def test_distant_points_do_not_overlap():
    groups = overlap_counts([[0.0, 0.0, 0.9], [1.0, 0.0, 0.9]], OverlapSpec(0.02, 0.01))
    assert [group.count for group in groups] == [1, 1]


def test_overlap_is_transitive_and_fidelity_aware():
    points = [[0.0, 0.0, 0.9], [0.015, 0.0, 0.9], [0.03, 0.0, 0.9], [0.0, 0.0, 0.5]]
    groups = overlap_counts(points)
    assert [group.count for group in groups] == [3, 1]
    assert groups[1].fidelity == 0.5


def test_overlap_partition(rng):
    points = np.column_stack([rng.uniform(0, 0.3, (500, 2)), rng.uniform(0.9, 1.0, 500)])
    groups = overlap_counts(points)
    assert sum(group.count for group in groups) == 500
    assert overlap_counts(np.empty((0, 3))) == []


def test_two_blobs(rng):
    blobs = np.concatenate([rng.normal(0, 0.2, (50, 2)), rng.normal(0, 0.2, (50, 2)) + [10.0, 0.0]])
    labels = dbscan(blobs, eps=1.0, min_pts=3)
    assert set(labels) == {0, 1}
    assert np.all(labels[:50] == 0) and np.all(labels[50:] == 1)


def test_sparse_points_are_noise():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [5.0, 5.0]])
    assert np.all(dbscan(points, eps=0.5, min_pts=2) == NOISE)


def test_dbscan_matches_reference(rng):
    for _ in range(100):
        points = rng.uniform(0, 1, (500, 2))
        labels = dbscan(points, eps=0.06, min_pts=5)
        expected, _ = reference_dbscan(points, 0.06, 5)
        assert np.array_equal(labels, expected)


def test_dbscan_permutation_invariance(rng):
    points = rng.uniform(0, 1, (400, 2))
    labels = dbscan(points, 0.07, 4)
    _, core = reference_dbscan(points, 0.07, 4)

    order = rng.permutation(400)
    shuffled = np.empty(400, dtype=int)
    shuffled[order] = dbscan(points[order], 0.07, 4)
    assert core_partition(labels, core) == core_partition(shuffled, core)
    assert np.array_equal(labels == NOISE, shuffled == NOISE)


def test_dbscan_rejects_bad_parameters():
    with pytest.raises(InvalidArgumentError):
        dbscan(np.zeros((3, 2)), eps=0.0, min_pts=2)
    with pytest.raises(InvalidArgumentError):
        dbscan(np.zeros((3, 2)), eps=1.0, min_pts=0)


def test_square_area():
    assert cluster_area([[0, 0], [1, 0], [1, 1], [0, 1]]) == pytest.approx(1.0, abs=1e-12)


def test_degenerate_areas():
    assert cluster_area([[0, 0], [1, 1], [2, 2]]) == 0.0
    assert cluster_area([[0, 0], [1, 1]]) == 0.0
    assert cluster_area([[0, 0], [0, 0], [1, 1]]) == 0.0


def test_area_matches_convex_hull(rng):
    for size in (3, 10, 50, 200, 400):
        for _ in range(10):
            points = rng.normal(size=(size, 2)) * rng.uniform(0.01, 3.0) + rng.uniform(-5, 5, 2)
            assert cluster_area(points) == pytest.approx(ConvexHull(points).volume, abs=1e-9)


def test_area_of_lattice():
    x, y = np.meshgrid(np.linspace(0, 1, 11), np.linspace(0, 1, 11))
    assert cluster_area(np.column_stack([x.ravel(), y.ravel()])) == pytest.approx(1.0, abs=1e-12)


def test_unit_square_calibration(rng):
    points = rng.uniform(0, 1, (2000, 2))
    report = cluster_density_index(points, eps=0.5, min_pts=1)
    assert report.n_clusters == 1
    assert report.a_bar == pytest.approx(1.0, rel=0.02)
    assert report.d_bar == pytest.approx(UNIT_SQUARE_MEAN_DISTANCE, rel=0.05)
    assert report.cdi == pytest.approx(1.0 / UNIT_SQUARE_MEAN_DISTANCE, rel=0.1)
    assert report.cdi == report.a_bar / report.d_bar
    assert report.l_bar == 0.0


def test_pair_cluster():
    report = cluster_density_index([[0.0, 0.0], [0.3, 0.4]], eps=1.0, min_pts=1)
    assert report.n_clusters == 1
    assert report.a_bar == 0.0
    assert report.d_bar == pytest.approx(0.5)
    assert report.cdi == 0.0
    assert report.status == 'ok'


def test_empty_and_undefined_reports():
    empty = cluster_density_index([[0.0, 0.0], [5.0, 5.0]], eps=1.0, min_pts=2)
    assert empty.status == 'empty' and empty.cdi is None and empty.n_clusters == 0

    singletons = cluster_density_index([[0.0, 0.0], [5.0, 5.0]], eps=1.0, min_pts=1)
    assert singletons.status == 'undefined' and singletons.cdi is None and singletons.n_clusters == 2
    assert singletons.l_bar == pytest.approx(np.hypot(5.0, 5.0))


def test_index_scales_linearly(rng):
    points = np.concatenate([rng.normal(0, 0.05, (200, 2)), rng.normal(0, 0.05, (200, 2)) + [1.0, 1.0]])
    base = cluster_density_index(points, eps=0.05, min_pts=4)
    scaled = cluster_density_index(points * 2.0, eps=0.05 * 2.0, min_pts=4)
    assert base.labels == scaled.labels
    assert scaled.a_bar == 4.0 * base.a_bar
    assert scaled.d_bar == 2.0 * base.d_bar
    assert scaled.l_bar == 2.0 * base.l_bar
    assert scaled.cdi == 2.0 * base.cdi


def test_report_summary_and_table(rng):
    points = rng.uniform(0, 1, (100, 2))
    report = cluster_density_index(points, eps=0.2, min_pts=3, params={'input': 'x'})
    summary = report.summary()
    assert 'labels' not in summary
    assert summary['params'] == {'input': 'x', 'n_points': 100}
    assert cluster_density_index(points, eps=0.2, min_pts=3, params={'input': 'x'}) == report

    rows = cdi_table({('sgd', 4): report, ('ga', 4): report})
    assert [row[0] for row in rows] == ['ga', 'sgd']
    assert len(rows[0]) == len(CDI_TABLE_HEADER)
