import math

from dataclasses import dataclass, field
from dataclasses_json import dataclass_json
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from qclscape import constants
from qclscape.errors import InvalidArgumentError
from qclscape.models.quantum import ControlPulse

__all__ = [
    'ClusterReport', 'ExperimentSpec', 'GridSpec', 'GridSummary', 'LandscapePoint', 'OptimResult',
    'OverlapGroup', 'OverlapSpec', 'PcaModel', 'PlotSpec', 'RunRecord',
]


@dataclass_json
@dataclass(frozen=True)
class GridSpec:
    n_params: int
    points_per_axis: int
    lo: float = constants.AMPLITUDE_MIN
    hi: float = constants.AMPLITUDE_MAX

    def __post_init__(self):
        if self.n_params < 1:
            raise InvalidArgumentError('n_params', self.n_params, "must be at least 1")
        if self.points_per_axis < 2:
            raise InvalidArgumentError('grid', self.points_per_axis, "at least 2 points per axis are required")
        if not self.lo < self.hi:
            raise InvalidArgumentError('range', (self.lo, self.hi), "lower bound must be below upper bound")

    @property
    def size(self):
        return self.points_per_axis ** self.n_params

    def axis_values(self):
        return np.linspace(self.lo, self.hi, self.points_per_axis)


@dataclass(frozen=True)
class LandscapePoint:
    amplitudes: Tuple[float, ...]
    fidelity: float
    pca_xy: Optional[Tuple[float, float]] = None


@dataclass_json
@dataclass
class GridSummary:
    count: int
    max_fidelity: float
    high_fidelity_fraction: float
    threshold: float


@dataclass_json
@dataclass
class PcaModel:
    n_params: int
    mean: List[float]
    loadings: List[List[float]]
    explained_variance: List[float]

    @property
    def mean_array(self):
        return np.asarray(self.mean, dtype=float)

    @property
    def loadings_array(self):
        return np.asarray(self.loadings, dtype=float).reshape(self.n_params, 2)


@dataclass
class OptimResult:
    best_pulse: ControlPulse
    best_fidelity: float
    iterations_used: int
    converged: bool
    trace: Optional[List[float]] = None

    @property
    def infidelity(self):
        return 1.0 - self.best_fidelity


@dataclass_json
@dataclass
class ExperimentSpec:
    algorithm: str
    n_params: int
    runs: int = constants.DEFAULT_RUNS
    base_seed: int = constants.DEFAULT_SEED
    total_time: float = constants.DEFAULT_TIME
    loadings_path: Optional[str] = None
    output_path: Optional[str] = None
    record_timing: bool = False
    overrides: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm not in constants.ALGORITHMS:
            raise InvalidArgumentError('algorithm', self.algorithm,
                                       f"expected one of {', '.join(constants.ALGORITHMS)}")
        if self.n_params < 1:
            raise InvalidArgumentError('n_params', self.n_params, "must be at least 1")
        if self.runs < 1:
            raise InvalidArgumentError('runs', self.runs, "must be at least 1")
        if not math.isfinite(self.total_time) or self.total_time <= 0:
            raise InvalidArgumentError('time', self.total_time, "must be finite and positive")

    def seed_for(self, run):
        return self.base_seed + run


@dataclass
class RunRecord:
    run: int
    seed: int
    amplitudes: List[float]
    fidelity: float
    iterations: int
    converged: bool
    ms: float = 0.0
    total_time: float = constants.DEFAULT_TIME
    pca_xy: Optional[Tuple[float, float]] = None

    @property
    def pulse(self):
        return ControlPulse(tuple(self.amplitudes), self.total_time)


@dataclass_json
@dataclass
class OverlapSpec:
    eps_xy: float = constants.OVERLAP_XY
    eps_fidelity: float = constants.OVERLAP_FIDELITY

    def __post_init__(self):
        if self.eps_xy <= 0 or self.eps_fidelity <= 0:
            raise InvalidArgumentError('overlap tolerances', (self.eps_xy, self.eps_fidelity), "must be positive")


@dataclass(frozen=True)
class OverlapGroup:
    x: float
    y: float
    fidelity: float
    count: int


@dataclass_json
@dataclass
class ClusterReport:
    eps: float
    min_pts: int
    n_clusters: int
    labels: List[int]
    areas: List[float]
    d_bar: Optional[float]
    l_bar: Optional[float]
    a_bar: Optional[float]
    cdi: Optional[float]
    status: str = 'ok'
    params: Dict[str, Any] = field(default_factory=dict)

    def summary(self):
        """Report without the per-point labels, as written to disk."""
        data = self.to_dict()
        data.pop('labels')
        return data


@dataclass_json
@dataclass
class PlotSpec:
    input_path: str
    output_path: str
    x_column: str = 'pc1'
    y_column: str = 'pc2'
    colormap: str = constants.PLOT_COLORMAP
    marker_radius: float = constants.PLOT_MARKER_RADIUS
    fidelity_min: Optional[float] = None
    overlap: bool = False
    title: str = ''

    def __post_init__(self):
        if self.fidelity_min is not None and not 0 <= self.fidelity_min <= 1:
            raise InvalidArgumentError('fidelity filter', self.fidelity_min, "must lie in [0, 1]")
        if self.marker_radius <= 0:
            raise InvalidArgumentError('marker radius', self.marker_radius, "must be positive")
