"""Exact piecewise-constant dynamics of a single qubit.

All functions are pure. Time is dimensionless with hbar = 1 and the default Hamiltonian is
H(a) = sx/2 + 2a sz, so each segment is a rotation of the Bloch vector about (1/2, 0, 2a).
"""
import logging
import math

import numpy as np

from qclscape import constants
from qclscape.errors import InvalidArgumentError, SpeedLimitNotFoundError
from qclscape.models import ControlPulse, GaConfig, HamiltonianSpec, QubitState

log = logging.getLogger(__name__)

LANDAU_ZENER = HamiltonianSpec()


def segment_propagator(a, dt, hamiltonian=LANDAU_ZENER):
    """exp(-i H(a) dt) in closed form: cos(W dt) I - i sin(W dt) (v/W).sigma, W = |v|."""
    if not math.isfinite(a):
        raise InvalidArgumentError('amplitude', a, "must be finite")
    if not math.isfinite(dt) or dt <= 0:
        raise InvalidArgumentError('dt', dt, "must be finite and positive")

    hx, _, hz = hamiltonian.field_vector(a)
    omega = math.hypot(hx, hz)
    c = math.cos(omega * dt)
    s = math.sin(omega * dt) / omega
    return np.array([
        [complex(c, -s * hz), complex(0.0, -s * hx)],
        [complex(0.0, -s * hx), complex(c, s * hz)],
    ])


def segment_propagators(amplitudes, dt, hamiltonian=LANDAU_ZENER):
    """Vectorized segment_propagator over an array of amplitudes, shape (..., 2, 2)."""
    amplitudes = np.asarray(amplitudes, dtype=float)
    hx = hamiltonian.drift
    hz = hamiltonian.control * amplitudes
    omega = np.hypot(hx, hz)
    c = np.cos(omega * dt)
    s = np.sin(omega * dt) / omega

    u = np.empty(amplitudes.shape + (2, 2), dtype=complex)
    u[..., 0, 0] = c - 1j * s * hz
    u[..., 0, 1] = -1j * s * hx
    u[..., 1, 0] = -1j * s * hx
    u[..., 1, 1] = c + 1j * s * hz
    return u


def evolve(initial, pulse, hamiltonian=LANDAU_ZENER):
    psi = initial.as_array()
    dt = pulse.dt
    for a in pulse.amplitudes:
        psi = segment_propagator(a, dt, hamiltonian) @ psi
    psi = psi / np.linalg.norm(psi)
    return QubitState.from_array(psi)


def fidelity(state, target):
    return float(abs(np.vdot(target.as_array(), state.as_array())) ** 2)


def pulse_fidelity(pulse, hamiltonian=LANDAU_ZENER):
    final = evolve(QubitState.ground(), pulse, hamiltonian)
    return fidelity(final, QubitState.excited())


def evolve_batch(amplitudes, total_time, initial=None, hamiltonian=LANDAU_ZENER):
    """Final states for a batch of pulses, amplitudes shape (B, N), returns (B, 2)."""
    amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=float))
    batch, n_params = amplitudes.shape
    dt = total_time / n_params

    psi = np.zeros((batch, 2), dtype=complex)
    if initial is None:
        psi[:, 0] = 1.0
    else:
        psi[:] = initial.as_array()

    propagators = segment_propagators(amplitudes, dt, hamiltonian)
    for k in range(n_params):
        psi = np.einsum('bij,bj->bi', propagators[:, k], psi)
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


def pulse_fidelities(amplitudes, total_time, hamiltonian=LANDAU_ZENER):
    """Fidelity to |1> from |0> for every row of a (B, N) amplitude array."""
    psi = evolve_batch(amplitudes, total_time, hamiltonian=hamiltonian)
    return np.abs(psi[:, 1]) ** 2


def estimate_speed_limit(max_time=constants.SPEED_LIMIT_MAX_TIME, scan_points=constants.SPEED_LIMIT_SCAN_POINTS,
                         segments=constants.SPEED_LIMIT_SEGMENTS, seed=constants.DEFAULT_SEED,
                         threshold=constants.SPEED_LIMIT_FIDELITY, ga_config=None):
    """Smallest scanned time T_k = k * max_time / scan_points whose budgeted GA reaches `threshold`."""
    # optim imports qdyn for the objective
    from qclscape.tasks.optim import ga_optimize

    if not math.isfinite(max_time) or max_time <= 0:
        raise InvalidArgumentError('max_time', max_time, "must be finite and positive")
    if scan_points < 1:
        raise InvalidArgumentError('scan_points', scan_points, "must be at least 1")
    if segments < 1:
        raise InvalidArgumentError('segments', segments, "must be at least 1")

    ga_config = ga_config or GaConfig(target_infidelity=1 - threshold, seed=seed)
    for k in range(1, scan_points + 1):
        total_time = max_time * k / scan_points
        result = ga_optimize(segments, total_time, ga_config)
        log.debug(f"Speed limit scan T={total_time:.6f} best fidelity {result.best_fidelity:.6f}")
        if result.best_fidelity >= threshold:
            log.info(f"Estimated T_min={total_time:.6f} with fidelity {result.best_fidelity:.6f}")
            return total_time
    raise SpeedLimitNotFoundError(max_time, threshold)
