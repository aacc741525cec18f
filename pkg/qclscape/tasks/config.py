import logging
import os

from dataclasses import dataclass, asdict
from get_docker_secret import get_docker_secret

from qclscape import constants
from qclscape.constants import LOG_FORMAT_MSG, DATE_FORMAT, ROOT_LOG_LEVEL
from qclscape.errors import InvalidArgumentError

log = logging.getLogger(__name__)


def log_config(root_log_level: str = ROOT_LOG_LEVEL) -> dict:
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'qclscape': {
                '()': 'qclscape.utils.UTCFormatter',
                'fmt': LOG_FORMAT_MSG,
                'datefmt': DATE_FORMAT
            }
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'formatter': 'qclscape'
            }
        },
        'root': {'handlers': ['console'], 'level': root_log_level},
        'loggers': {
            'qclscape': {'handlers': ['console'], 'level': root_log_level, 'propagate': False},
            'matplotlib': {'handlers': ['console'], 'level': 'WARNING', 'propagate': False},
            'PIL': {'handlers': ['console'], 'level': 'WARNING', 'propagate': False},
        }
    }


def read_config_file(path):
    """Parse a plain `key = value` file, `#` starts a comment."""
    values = {}
    with open(path) as handle:
        for number, line in enumerate(handle, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise InvalidArgumentError('config line', f'{path}:{number}', "expected `key = value`")
            key, value = line.split('=', 1)
            values[key.strip().replace('-', '_')] = value.strip()
    return values


def cast_bool(value):
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on')


class Borg:
    _shared_state = {}

    def __init__(self):
        self.__dict__ = self._shared_state

    def __hash__(self):
        return 1

    def __eq__(self, other):
        try:
            return self.__dict__ is other.__dict__
        except Exception:
            return 0


@dataclass(eq=False)
class Config(Borg):
    root_log_level: str
    jobs: int
    time: float
    grid: int
    max_points: int
    high_fidelity: float
    seed: int
    runs: int
    dbscan_eps: float
    dbscan_min_pts: int
    overlap_xy: float
    overlap_fidelity: float
    bins: int
    record_timing: bool
    config_file: str

    def __init__(self, config_file=None):
        Borg.__init__(self)

        if config_file is None and 'root_log_level' in self.__dict__:
            return

        file_values = read_config_file(config_file) if config_file else {}

        def setting(key, default, cast_to):
            if key in file_values:
                try:
                    return cast_to(file_values[key])
                except ValueError:
                    raise InvalidArgumentError(key, file_values[key], f"expected {cast_to.__name__}")
            if cast_to is cast_bool:
                value = get_docker_secret(f'qclscape_{key}', default=None)
                return default if value is None else cast_bool(value)
            return get_docker_secret(f'qclscape_{key}', default=default, cast_to=cast_to)

        self.config_file = config_file or ''
        self.root_log_level = setting('root_log_level', ROOT_LOG_LEVEL, str).upper()
        self.jobs = setting('jobs', os.cpu_count() or 1, int)
        self.time = setting('time', constants.DEFAULT_TIME, float)
        self.grid = setting('grid', 0, int)
        self.max_points = setting('max_points', constants.GRID_MAX_POINTS, int)
        self.high_fidelity = setting('high_fidelity', constants.HIGH_FIDELITY, float)
        self.seed = setting('seed', constants.DEFAULT_SEED, int)
        self.runs = setting('runs', constants.DEFAULT_RUNS, int)
        self.dbscan_eps = setting('dbscan_eps', constants.DBSCAN_EPS, float)
        self.dbscan_min_pts = setting('dbscan_min_pts', constants.DBSCAN_MIN_PTS, int)
        self.overlap_xy = setting('overlap_xy', constants.OVERLAP_XY, float)
        self.overlap_fidelity = setting('overlap_fidelity', constants.OVERLAP_FIDELITY, float)
        self.bins = setting('bins', constants.HISTOGRAM_BINS, int)
        self.record_timing = setting('record_timing', False, cast_bool)

        unknown = set(file_values) - set(self.asdict())
        if unknown:
            log.warning(f"Ignoring unknown config keys {sorted(unknown)} in {config_file}")

    @classmethod
    def reset(cls):
        cls._shared_state.clear()

    def asdict(self):
        return asdict(self)

    def grid_points(self, n_params):
        if self.grid:
            return self.grid
        return constants.GRID_POINTS.get(n_params, constants.GRID_POINTS_FALLBACK)

    def default_map(self):
        """Option defaults per command, layered under explicit command-line flags."""
        grid = self.grid or None
        analysis = {
            'eps': self.dbscan_eps, 'min_pts': self.dbscan_min_pts, 'fidelity_min': self.high_fidelity,
            'overlap_xy': self.overlap_xy, 'overlap_fidelity': self.overlap_fidelity,
        }
        return {
            'bruteforce': {'time': self.time, 'grid': grid, 'threshold': self.high_fidelity},
            'optimize': {'time': self.time, 'runs': self.runs, 'seed': self.seed, 'timing': self.record_timing},
            'analyze': analysis,
            'plot': {'overlap_xy': self.overlap_xy, 'overlap_fidelity': self.overlap_fidelity},
            'histogram': {'bins': self.bins},
            'speed-limit': {'seed': self.seed},
            'pipeline': dict(
                analysis, time=self.time, grid=grid, runs=self.runs, seed=self.seed, bins=self.bins,
                max_points=self.max_points, timing=self.record_timing,
            ),
        }
