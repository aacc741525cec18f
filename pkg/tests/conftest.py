import numpy as np
import pytest

from qclscape.tasks.config import Config
from qclscape.utils import write_csv


@pytest.fixture(autouse=True)
def fresh_config(monkeypatch):
    monkeypatch.setenv('QCLSCAPE_JOBS', '1')
    Config.reset()
    yield
    Config.reset()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def points_csv(tmp_path):
    """Write (pc1, pc2, fidelity) rows to a CSV and return its path."""
    def write(points, name='points.csv'):
        path = str(tmp_path / name)
        write_csv(path, 'test', {}, ['pc1', 'pc2', 'fidelity'], (list(row) for row in points))
        return path
    return write
