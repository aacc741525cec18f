import json
import math

import numpy as np
import pytest

from qclscape.errors import DegenerateInputError, DimensionMismatchError, SchemaValidationError
from qclscape.models import GridSpec, PcaModel, serializer
from qclscape.tasks import pca
from qclscape.tasks.landscape import grid_arrays


@pytest.fixture
def line_model():
    x = np.linspace(-1, 1, 50)
    return pca.fit(np.column_stack([x, 2 * x]))


def test_rank_one_direction(line_model):
    loadings = line_model.loadings_array
    assert np.allclose(loadings[:, 0], np.array([1.0, 2.0]) / math.sqrt(5), atol=1e-10)
    assert line_model.explained_variance[1] == pytest.approx(0.0, abs=1e-10)


def test_isotropic_cloud(rng):
    model = pca.fit(rng.normal(size=(100000, 2)))
    first, second = model.explained_variance
    assert first == pytest.approx(1.0, rel=0.05)
    assert second == pytest.approx(1.0, rel=0.05)
    assert first >= second


def test_invariants_on_random_data(rng):
    data = rng.normal(size=(500, 4)) @ rng.normal(size=(4, 4))
    model = pca.fit(data)
    loadings = model.loadings_array
    assert np.allclose(loadings.T @ loadings, np.eye(2), atol=1e-10)
    assert model.explained_variance[0] >= model.explained_variance[1] >= 0
    assert sum(pca.explained_variance_ratio(model, data)) <= 1 + 1e-10
    for column in loadings.T:
        assert column[np.argmax(np.abs(column))] > 0

    projected = pca.transform(model, data)
    variances = projected.var(axis=0, ddof=1)
    assert np.allclose(variances, model.explained_variance, rtol=1e-8)


def test_jacobi_matches_numpy(rng):
    m = rng.normal(size=(4, 4))
    symmetric = m + m.T
    values, vectors = pca.jacobi_eigh(symmetric)
    assert np.allclose(np.sort(values), np.linalg.eigvalsh(symmetric), atol=1e-10)
    assert np.allclose(symmetric @ vectors, vectors * values, atol=1e-10)


def test_fit_is_deterministic(rng):
    data = rng.uniform(-1, 1, (200, 3))
    assert serializer(pca.fit(data)) == serializer(pca.fit(data.copy()))


def test_transform_mean_and_linearity(rng):
    data = rng.uniform(-1, 1, (100, 3))
    model = pca.fit(data)
    assert np.allclose(pca.transform(model, [model.mean]), 0.0, atol=1e-15)

    x, delta = rng.uniform(-1, 1, 3), rng.uniform(-0.1, 0.1, 3)
    shift = pca.transform(model, x + delta) - pca.transform(model, x)
    assert np.allclose(shift[0], delta @ model.loadings_array, atol=1e-12)


def test_rank_two_reconstruction(rng):
    coefficients = rng.normal(size=(100, 2))
    basis = np.array([[1.0, 0.5, -0.2], [0.0, 1.0, 0.7]])
    data = coefficients @ basis + np.array([0.1, -0.3, 0.2])
    model = pca.fit(data)
    restored = pca.reconstruct(model, pca.transform(model, data))
    assert np.max(np.abs(restored - data)) < 1e-10


@pytest.mark.parametrize('data', [np.zeros((2, 3)), np.ones((10, 1)), np.ones((10, 3))])
def test_degenerate_inputs(data):
    with pytest.raises(DegenerateInputError):
        pca.fit(data)


def test_dimension_mismatch():
    model = pca.fit(grid_arrays(GridSpec(3, 5), 2 * math.pi)[0])
    with pytest.raises(DimensionMismatchError):
        pca.transform(model, np.zeros((4, 4)))


def test_save_load_round_trip(tmp_path, rng):
    model = pca.fit(rng.uniform(-1, 1, (300, 3)))
    first, second = tmp_path / 'first.json', tmp_path / 'second.json'
    pca.save(model, str(first))
    pca.save(pca.load(str(first)), str(second))
    assert first.read_bytes() == second.read_bytes()


def test_saved_model_fields_and_precision(tmp_path):
    model = PcaModel(n_params=2, mean=[1 / 3, 0.0], loadings=[[1.0, 0.0], [0.0, 1.0]], explained_variance=[0.5, 0.25])
    path = tmp_path / 'model.json'
    pca.save(model, str(path))
    text = path.read_text()
    assert set(json.loads(text)) == {'n_params', 'mean', 'loadings', 'explained_variance'}
    assert '0.33333333333333331' in text
    assert text.endswith('  "n_params": 2\n}\n')
    assert pca.load(str(path)).mean == [1 / 3, 0.0]


def test_explained_variance_ratio(line_model):
    x = np.linspace(-1, 1, 50)
    assert pca.explained_variance_ratio(line_model, np.column_stack([x, 2 * x])) == pytest.approx([1.0, 0.0], abs=1e-10)


def test_load_rejects_non_orthonormal(tmp_path, line_model):
    path = tmp_path / 'model.json'
    data = line_model.to_dict()
    data['loadings'] = [[1.0, 1.0], [0.0, 1.0]]
    path.write_text(serializer(data))
    with pytest.raises(SchemaValidationError) as info:
        pca.load(str(path))
    assert info.value.field == 'loadings'


def test_load_rejects_missing_field(tmp_path, line_model):
    path = tmp_path / 'model.json'
    data = line_model.to_dict()
    del data['mean']
    path.write_text(serializer(data))
    with pytest.raises(SchemaValidationError) as info:
        pca.load(str(path))
    assert info.value.field == 'mean'


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / 'model.json'
    path.write_text('{not json')
    with pytest.raises(SchemaValidationError):
        pca.load(str(path))
