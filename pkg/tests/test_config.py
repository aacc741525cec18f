import math

import pytest

from qclscape.errors import InvalidArgumentError
from qclscape.tasks.config import Config, log_config


def test_defaults():
    config = Config()
    assert config.jobs == 1
    assert config.time == 2 * math.pi
    assert config.runs == 1000
    assert config.record_timing is False
    assert config.grid_points(2) == 101
    assert config.grid_points(4) == 31


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv('QCLSCAPE_RUNS', '7')
    monkeypatch.setenv('QCLSCAPE_RECORD_TIMING', 'true')
    config = Config()
    assert config.runs == 7
    assert config.record_timing is True


def test_file_wins_over_environment(monkeypatch, tmp_path):
    monkeypatch.setenv('QCLSCAPE_RUNS', '7')
    path = tmp_path / 'settings.conf'
    path.write_text('runs = 3  # short\ngrid = 12\ndbscan-eps = 0.2\n')
    config = Config(str(path))
    assert config.runs == 3
    assert config.grid_points(4) == 12
    assert config.dbscan_eps == 0.2
    assert config.default_map()['analyze']['eps'] == 0.2
    assert config.default_map()['bruteforce']['grid'] == 12


@pytest.mark.parametrize('text', ['runs = many\n', 'just words\n'])
def test_bad_config_file(tmp_path, text):
    path = tmp_path / 'settings.conf'
    path.write_text(text)
    with pytest.raises(InvalidArgumentError):
        Config(str(path))


def test_shared_state():
    first = Config()
    second = Config()
    assert first == second
    first.runs = 11
    assert second.runs == 11


def test_default_map_covers_commands():
    commands = set(Config().default_map())
    assert commands == {'bruteforce', 'optimize', 'analyze', 'plot', 'histogram', 'speed-limit', 'pipeline'}


def test_log_config_level():
    config = log_config('DEBUG')
    assert config['root']['level'] == 'DEBUG'
    assert config['loggers']['qclscape']['level'] == 'DEBUG'
