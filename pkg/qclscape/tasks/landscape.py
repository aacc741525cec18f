import logging

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from qclscape import constants
from qclscape.errors import GridTooLargeError, InvalidArgumentError
from qclscape.models import GridSummary, LandscapePoint
from qclscape.qdyn import pulse_fidelities
from qclscape.utils import write_csv

log = logging.getLogger(__name__)


def grid_chunk(spec, total_time, index):
    """Points whose leading amplitude is axis value `index`, last axis fastest."""
    axis = spec.axis_values()
    if spec.n_params == 1:
        amplitudes = axis.reshape(-1, 1)
    else:
        rest = np.meshgrid(*([axis] * (spec.n_params - 1)), indexing='ij')
        rest = np.stack([r.ravel() for r in rest], axis=1)
        amplitudes = np.empty((rest.shape[0], spec.n_params))
        amplitudes[:, 0] = axis[index]
        amplitudes[:, 1:] = rest
    return amplitudes, pulse_fidelities(amplitudes, total_time)


def chunk_indices(spec):
    return range(spec.points_per_axis) if spec.n_params > 1 else range(1)


def iter_grid_chunks(spec, total_time, jobs=1):
    """Yield (amplitudes, fidelities) per leading-axis chunk, always in index order."""
    indices = chunk_indices(spec)
    if jobs <= 1 or len(indices) == 1:
        for index in indices:
            yield grid_chunk(spec, total_time, index)
        return

    with ProcessPoolExecutor(max_workers=jobs) as executor:
        yield from executor.map(grid_chunk, [spec] * len(indices), [total_time] * len(indices), indices)


def generate_grid(spec, total_time, jobs=1):
    for amplitudes, fidelities in iter_grid_chunks(spec, total_time, jobs):
        for row, value in zip(amplitudes, fidelities):
            yield LandscapePoint(tuple(float(a) for a in row), float(value))


def filter_high_fidelity(points, threshold=constants.HIGH_FIDELITY):
    if not 0 <= threshold <= 1:
        raise InvalidArgumentError('threshold', threshold, "must lie in [0, 1]")
    return (point for point in points if point.fidelity > threshold)


def grid_arrays(spec, total_time, max_points=constants.GRID_MAX_POINTS, jobs=1):
    """Materialize the whole grid, refusing anything above the in-memory budget."""
    if spec.size > max_points:
        raise GridTooLargeError(spec.size, max_points)
    chunks = list(iter_grid_chunks(spec, total_time, jobs))
    amplitudes = np.concatenate([chunk[0] for chunk in chunks])
    fidelities = np.concatenate([chunk[1] for chunk in chunks])
    return amplitudes, fidelities


def write_grid_csv(spec, total_time, path, jobs=1, threshold=constants.HIGH_FIDELITY, arrays=None):
    """Stream the grid to CSV and return a GridSummary, `arrays` from grid_arrays are written as they are."""
    header = [f'a{k + 1}' for k in range(spec.n_params)] + ['fidelity']
    summary = {'count': 0, 'max': 0.0, 'high': 0}

    chunks = [arrays] if arrays is not None else iter_grid_chunks(spec, total_time, jobs)

    def rows():
        for amplitudes, fidelities in chunks:
            summary['count'] += len(fidelities)
            summary['max'] = max(summary['max'], float(fidelities.max()))
            summary['high'] += int(np.count_nonzero(fidelities > threshold))
            for row, value in zip(amplitudes, fidelities):
                yield list(row) + [value]

    provenance = dict(spec.to_dict(), time=total_time)
    write_csv(path, 'bruteforce', provenance, header, rows())
    result = GridSummary(
        count=summary['count'],
        max_fidelity=summary['max'],
        high_fidelity_fraction=summary['high'] / summary['count'],
        threshold=threshold,
    )
    log.info(
        f"Wrote {result.count} grid points to {path}, max fidelity {result.max_fidelity:.6f}, "
        f"{result.high_fidelity_fraction:.4%} above {threshold}"
    )
    return result


def high_fidelity_fraction(spec, total_time, threshold=constants.HIGH_FIDELITY, jobs=1):
    count = 0
    high = 0
    for _, fidelities in iter_grid_chunks(spec, total_time, jobs):
        count += len(fidelities)
        high += int(np.count_nonzero(fidelities > threshold))
    return high / count
