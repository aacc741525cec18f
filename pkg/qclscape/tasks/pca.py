import logging
import math

import numpy as np

from qclscape.errors import DegenerateInputError, DimensionMismatchError, SchemaValidationError
from qclscape.models import PcaModel, deserializer, serializer

log = logging.getLogger(__name__)

JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100
ORTHONORMAL_TOLERANCE = 1e-10


def off_diagonal_norm(matrix):
    return math.sqrt(float(np.sum(matrix ** 2) - np.sum(np.diag(matrix) ** 2)))


def jacobi_eigh(matrix, tol=JACOBI_TOLERANCE, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigen-decomposition of a small symmetric matrix.

    Returns (eigenvalues, eigenvectors) with eigenvectors as columns, unsorted.
    """
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(1.0, float(np.linalg.norm(a)))

    for _ in range(max_sweeps):
        if off_diagonal_norm(a) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                rotation = np.eye(n)
                rotation[p, p] = c
                rotation[q, q] = c
                rotation[p, q] = s
                rotation[q, p] = -s
                a = rotation.T @ a @ rotation
                a[p, q] = a[q, p] = 0.0
                v = v @ rotation
    else:
        log.warning(f"Jacobi stopped after {max_sweeps} sweeps, off-diagonal norm {off_diagonal_norm(a):.3e}")

    return np.diag(a).copy(), v


def apply_sign_convention(vectors):
    """Flip each column so its entry of largest magnitude is positive."""
    vectors = vectors.copy()
    for j in range(vectors.shape[1]):
        if vectors[np.argmax(np.abs(vectors[:, j])), j] < 0:
            vectors[:, j] = -vectors[:, j]
    return vectors


def fit(data):
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 3:
        raise DegenerateInputError("at least 3 rows are required")
    if data.shape[1] < 2:
        raise DegenerateInputError("at least 2 parameters are required")

    n_rows, n_params = data.shape
    mean = data.mean(axis=0)
    centered = data - mean
    covariance = centered.T @ centered / (n_rows - 1)
    total_variance = float(np.trace(covariance))
    if total_variance <= 0.0:
        raise DegenerateInputError("data has zero variance")

    eigenvalues, eigenvectors = jacobi_eigh(covariance)
    order = np.argsort(-eigenvalues, kind='stable')[:2]
    loadings = apply_sign_convention(eigenvectors[:, order])
    explained = np.maximum(eigenvalues[order], 0.0)

    model = PcaModel(
        n_params=n_params,
        mean=[float(m) for m in mean],
        loadings=[[float(x), float(y)] for x, y in loadings],
        explained_variance=[float(e) for e in explained],
    )
    ratio = explained / total_variance
    log.info(f"Fitted {n_params}-parameter PCA on {n_rows} rows, explained variance ratio {ratio[0]:.4f}, "
             f"{ratio[1]:.4f}")
    return model


def explained_variance_ratio(model, data):
    """Share of the total variance of `data` carried by each component."""
    data = check_dimension(model, data)
    total = float(np.trace(np.atleast_2d(np.cov(data, rowvar=False)))) if len(data) > 1 else 0.0
    if total <= 0.0:
        return [0.0, 0.0]
    return [v / total for v in model.explained_variance]


def check_dimension(model, points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != model.n_params:
        raise DimensionMismatchError(model.n_params, points.shape[1])
    return points


def transform(model, points):
    points = check_dimension(model, points)
    return (points - model.mean_array) @ model.loadings_array


def reconstruct(model, coords):
    coords = np.atleast_2d(np.asarray(coords, dtype=float))
    return model.mean_array + coords @ model.loadings_array.T


def validate(model):
    n = model.n_params
    if n < 2:
        raise SchemaValidationError('n_params', "at least 2 parameters are required")
    if len(model.mean) != n:
        raise SchemaValidationError('mean', f"expected {n} entries, found {len(model.mean)}")
    if len(model.loadings) != n or any(len(row) != 2 for row in model.loadings):
        raise SchemaValidationError('loadings', f"expected a {n}x2 matrix")
    if len(model.explained_variance) != 2:
        raise SchemaValidationError('explained_variance', "expected 2 entries")

    values = np.concatenate([model.mean_array, model.loadings_array.ravel(), model.explained_variance])
    if not np.all(np.isfinite(values)):
        raise SchemaValidationError('loadings', "non-finite values")

    gram = model.loadings_array.T @ model.loadings_array
    if np.max(np.abs(gram - np.eye(2))) > ORTHONORMAL_TOLERANCE:
        raise SchemaValidationError('loadings', "columns are not orthonormal")
    first, second = model.explained_variance
    if not first >= second >= 0:
        raise SchemaValidationError('explained_variance', "must be non-negative and descending")
    return model


def save(model, path):
    with open(path, 'w') as handle:
        handle.write(serializer(model))
    log.info(f"Saved PCA model to {path}")


def load(path):
    with open(path) as handle:
        model = deserializer(handle.read(), PcaModel)
    return validate(model)
