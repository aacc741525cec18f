import math

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from qclscape import constants
from qclscape.errors import InvalidArgumentError

__all__ = ['ControlPulse', 'HamiltonianSpec', 'QubitState', 'SIGMA_X', 'SIGMA_Z']

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class QubitState:
    c0: complex
    c1: complex

    @classmethod
    def ground(cls):
        return cls(1 + 0j, 0j)

    @classmethod
    def excited(cls):
        return cls(0j, 1 + 0j)

    @classmethod
    def from_array(cls, vector):
        return cls(complex(vector[0]), complex(vector[1]))

    def as_array(self):
        return np.array([self.c0, self.c1], dtype=complex)

    def norm_squared(self):
        return abs(self.c0) ** 2 + abs(self.c1) ** 2

    def bloch_angles(self):
        """Polar angle in [0, pi] and azimuth in [0, 2pi) of the Bloch vector."""
        theta = 2 * math.acos(min(1.0, abs(self.c0)))
        if abs(self.c0) < 1e-15 or abs(self.c1) < 1e-15:
            return theta, 0.0
        phi = (np.angle(self.c1) - np.angle(self.c0)) % (2 * math.pi)
        return theta, float(phi)


@dataclass(frozen=True)
class ControlPulse:
    amplitudes: Tuple[float, ...]
    total_time: float

    def __post_init__(self):
        amplitudes = tuple(float(a) for a in self.amplitudes)
        object.__setattr__(self, 'amplitudes', amplitudes)

        if not amplitudes:
            raise InvalidArgumentError('pulse', amplitudes, "at least one segment is required")
        if not math.isfinite(self.total_time) or self.total_time <= 0:
            raise InvalidArgumentError('total_time', self.total_time, "must be finite and positive")
        for amplitude in amplitudes:
            if not math.isfinite(amplitude) or not constants.AMPLITUDE_MIN <= amplitude <= constants.AMPLITUDE_MAX:
                raise InvalidArgumentError('amplitude', amplitude, "must lie in [-1, 1]")

    @property
    def n_params(self):
        return len(self.amplitudes)

    @property
    def dt(self):
        return self.total_time / len(self.amplitudes)

    def reversed(self):
        return ControlPulse(self.amplitudes[::-1], self.total_time)

    def negated(self):
        return ControlPulse(tuple(-a for a in self.amplitudes), self.total_time)


@dataclass(frozen=True)
class HamiltonianSpec:
    drift: float = constants.DRIFT_X
    control: float = constants.CONTROL_Z

    def field_vector(self, amplitude):
        return (self.drift, 0.0, self.control * amplitude)

    def matrix(self, amplitude):
        return self.drift * SIGMA_X + self.control * amplitude * SIGMA_Z
