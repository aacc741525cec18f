import logging

from collections import deque

import numpy as np

from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from qclscape import constants
from qclscape.errors import InvalidArgumentError
from qclscape.models import ClusterReport, OverlapGroup, OverlapSpec

log = logging.getLogger(__name__)

NOISE = -1
UNCLASSIFIED = -2

SUPER_TRIANGLE = np.array([[-100.0, -100.0], [100.0, -100.0], [0.5, 200.0]])
COLLINEAR_TOLERANCE = 1e-12
# points on a circumcircle within rounding count as inside, so cocircular lattices stay consistent
CIRCLE_TOLERANCE = 1e-12


def overlap_counts(points, spec=None):
    """Group (x, y, fidelity) rows linked by close coordinates and fidelity, transitively.

    Groups come back in order of their first member with the member centroid as representative.
    """
    spec = spec or OverlapSpec()
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(points) == 0:
        return []
    if not np.all(np.isfinite(points)):
        raise InvalidArgumentError('points', 'non-finite', "overlap counting needs finite coordinates")

    pairs = cKDTree(points[:, :2]).query_pairs(spec.eps_xy, output_type='ndarray')
    if len(pairs):
        gaps = np.hypot(*(points[pairs[:, 0], :2] - points[pairs[:, 1], :2]).T)
        linked = (gaps < spec.eps_xy) & (np.abs(points[pairs[:, 0], 2] - points[pairs[:, 1], 2]) < spec.eps_fidelity)
        pairs = pairs[linked]

    n = len(points)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)

    _, first = np.unique(labels, return_index=True)
    groups = []
    for label in labels[np.sort(first)]:
        members = points[labels == label]
        x, y, fidelity = members.mean(axis=0)
        groups.append(OverlapGroup(float(x), float(y), float(fidelity), len(members)))
    return groups


def dbscan(points, eps=constants.DBSCAN_EPS, min_pts=constants.DBSCAN_MIN_PTS):
    """Density clustering scanned in index order, -1 marks noise.

    A point is core when at least min_pts points, itself included, lie within eps.
    """
    if eps <= 0:
        raise InvalidArgumentError('eps', eps, "must be positive")
    if min_pts < 1:
        raise InvalidArgumentError('min_pts', min_pts, "must be at least 1")
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(points)
    labels = np.full(n, UNCLASSIFIED, dtype=int)
    if n == 0:
        return labels

    neighbors = cKDTree(points).query_ball_point(points, eps)
    core = np.array([len(found) >= min_pts for found in neighbors])

    cluster = 0
    for i in range(n):
        if labels[i] != UNCLASSIFIED:
            continue
        if not core[i]:
            labels[i] = NOISE
            continue

        labels[i] = cluster
        queue = deque(neighbors[i])
        while queue:
            j = queue.popleft()
            if labels[j] == NOISE:
                labels[j] = cluster
            if labels[j] != UNCLASSIFIED:
                continue
            labels[j] = cluster
            if core[j]:
                queue.extend(neighbors[j])
        cluster += 1
    return labels


def circumcircles(vertices, triangles):
    a, b, c = (vertices[triangles[:, k]] for k in range(3))
    d = 2.0 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
    a2 = np.sum(a * a, axis=1)
    b2 = np.sum(b * b, axis=1)
    c2 = np.sum(c * c, axis=1)
    ux = (a2 * (b[:, 1] - c[:, 1]) + b2 * (c[:, 1] - a[:, 1]) + c2 * (a[:, 1] - b[:, 1])) / d
    uy = (a2 * (c[:, 0] - b[:, 0]) + b2 * (a[:, 0] - c[:, 0]) + c2 * (b[:, 0] - a[:, 0])) / d
    centers = np.stack([ux, uy], axis=1)
    return centers, np.sum((a - centers) ** 2, axis=1)


def cross(o, a, b):
    return (a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0])


def bowyer_watson(points):
    """Delaunay triangles over `points` as index triples, counter-clockwise."""
    n = len(points)
    vertices = np.concatenate([points, SUPER_TRIANGLE])
    triangles = np.array([[n, n + 1, n + 2]])
    centers, radii = circumcircles(vertices, triangles)

    for index in range(n):
        p = vertices[index]
        bad = np.sum((centers - p) ** 2, axis=1) <= radii * (1.0 + CIRCLE_TOLERANCE)
        cavity = triangles[bad]

        edges = np.concatenate([cavity[:, [0, 1]], cavity[:, [1, 2]], cavity[:, [2, 0]]])
        keys = np.sort(edges, axis=1)
        _, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
        boundary = edges[counts[inverse.ravel()] == 1]

        fresh = np.column_stack([boundary, np.full(len(boundary), index)])
        fresh_centers, fresh_radii = circumcircles(vertices, fresh)
        keep = ~bad
        triangles = np.concatenate([triangles[keep], fresh])
        centers = np.concatenate([centers[keep], fresh_centers])
        radii = np.concatenate([radii[keep], fresh_radii])

    return triangles[np.all(triangles < n, axis=1)]


def boundary_loop(triangles):
    """Ordered outer boundary of a triangulated region, counter-clockwise."""
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    directed = {(int(a), int(b)) for a, b in edges}
    following = {a: b for a, b in directed if (b, a) not in directed}
    start = min(following)
    loop = [start]
    current = following[start]
    while current != start and len(loop) <= len(following):
        loop.append(current)
        current = following[current]
    return loop


def fill_pockets(points, loop):
    """Triangles closing reflex corners of the boundary so the region becomes its convex hull."""
    loop = list(loop)
    pockets = []
    changed = True
    while changed and len(loop) > 3:
        changed = False
        i = 0
        while i < len(loop) and len(loop) > 3:
            p, q, r = loop[i - 1], loop[i], loop[(i + 1) % len(loop)]
            if cross(points[p], points[q], points[r]) <= 0:
                pockets.append((p, r, q))
                del loop[i]
                changed = True
            else:
                i += 1
    return pockets


def triangle_areas(points, triangles):
    triangles = np.asarray(triangles, dtype=int).reshape(-1, 3)
    return 0.5 * np.abs(cross(points[triangles[:, 0]], points[triangles[:, 1]], points[triangles[:, 2]]))


def cluster_area(points):
    """Area covered by the Delaunay triangulation of the cluster, its convex hull."""
    points = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(points) < 3:
        return 0.0

    origin = points.min(axis=0)
    extent = float(np.max(points.max(axis=0) - origin))
    unit = (points - origin) / extent
    spread = np.linalg.svd(unit - unit.mean(axis=0), compute_uv=False)
    if spread[1] <= COLLINEAR_TOLERANCE * spread[0]:
        return 0.0

    triangles = bowyer_watson(unit)
    if len(triangles) == 0:
        return 0.0
    pockets = fill_pockets(unit, boundary_loop(triangles))
    area = float(np.sum(triangle_areas(unit, triangles)) + np.sum(triangle_areas(unit, pockets)))
    return area * extent * extent


def mean_pairwise_distance(points):
    distances = pdist(points)
    return float(distances.mean()) if len(distances) else 0.0


def cluster_density_index(points, eps=constants.DBSCAN_EPS, min_pts=constants.DBSCAN_MIN_PTS, params=None):
    """Cluster the PCA-plane points and report mean area over mean intra-cluster distance."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    labels = dbscan(points, eps, min_pts)
    clusters = [label for label in np.unique(labels) if label >= 0]
    params = dict(params or {}, n_points=len(points))

    if not clusters:
        log.warning(f"No clusters found among {len(points)} points with eps={eps}, min_pts={min_pts}")
        return ClusterReport(eps, min_pts, 0, labels.tolist(), [], None, None, None, None, 'empty', params)

    members = [points[labels == label] for label in clusters]
    areas = [cluster_area(group) for group in members]
    spreads = [mean_pairwise_distance(group) for group in members if len(group) >= 2]
    centroids = np.array([group.mean(axis=0) for group in members])

    a_bar = float(np.mean(areas))
    l_bar = mean_pairwise_distance(centroids)
    d_bar = float(np.mean(spreads)) if spreads else 0.0

    if d_bar <= 0.0:
        log.warning(f"All {len(clusters)} clusters are single points, the density index is undefined")
        return ClusterReport(eps, min_pts, len(clusters), labels.tolist(), areas, d_bar, l_bar, a_bar, None,
                             'undefined', params)

    report = ClusterReport(eps, min_pts, len(clusters), labels.tolist(), areas, d_bar, l_bar, a_bar, a_bar / d_bar,
                           'ok', params)
    log.info(f"Found {report.n_clusters} clusters, A={a_bar:.6f} D={d_bar:.6f} L={l_bar:.6f} CDI={report.cdi:.6f}")
    return report


CDI_TABLE_HEADER = ['algorithm', 'n_params', 'n_clusters', 'l_bar', 'd_bar', 'a_bar', 'cdi', 'status']


def cdi_table(reports):
    """Rows comparing cluster statistics, `reports` maps (algorithm, n_params) to a ClusterReport."""
    rows = []
    for (algorithm, n_params), report in sorted(reports.items()):
        rows.append([
            algorithm, n_params, report.n_clusters, report.l_bar, report.d_bar, report.a_bar, report.cdi,
            report.status,
        ])
    return rows
