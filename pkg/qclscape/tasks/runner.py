import logging
import os
import time

from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields

import numpy as np

from qclscape import constants
from qclscape.errors import DimensionMismatchError, InvalidArgumentError, RecordMismatchError, SchemaValidationError
from qclscape.models import DqnConfig, GaConfig, PpoConfig, QlConfig, RunRecord, SgdConfig
from qclscape.qdyn import pulse_fidelity
from qclscape.tasks import pca
from qclscape.tasks.optim import ga_optimize, sgd_optimize
from qclscape.tasks.rl import train
from qclscape.utils import amplitude_columns, read_csv, write_csv

log = logging.getLogger(__name__)

RECORD_TOLERANCE = 1e-12

CONFIG_CLASSES = {'sgd': SgdConfig, 'ga': GaConfig, 'ql': QlConfig, 'dqn': DqnConfig, 'ppo': PpoConfig}


def overrides_for(algorithm, overrides):
    """Keep only the settings the algorithm's config understands."""
    known = {f.name for f in fields(CONFIG_CLASSES[algorithm])}
    return {key: value for key, value in overrides.items() if key in known}


def build_config(config_class, overrides, seed):
    known = {f.name for f in fields(config_class)}
    unknown = set(overrides) - known
    if unknown:
        raise InvalidArgumentError('override', ', '.join(sorted(unknown)), f"not a {config_class.__name__} field")
    return config_class(**dict(overrides, seed=seed))


def run_sgd(n_params, total_time, seed, overrides):
    return sgd_optimize(n_params, total_time, build_config(CONFIG_CLASSES['sgd'], overrides, seed))


def run_ga(n_params, total_time, seed, overrides):
    return ga_optimize(n_params, total_time, build_config(CONFIG_CLASSES['ga'], overrides, seed))


def rl_runner(algorithm):
    def run(n_params, total_time, seed, overrides):
        return train(algorithm, n_params, total_time, build_config(CONFIG_CLASSES[algorithm], overrides, seed))
    return run


OPTIMIZERS = {
    'sgd': run_sgd,
    'ga': run_ga,
    'ql': rl_runner('ql'),
    'dqn': rl_runner('dqn'),
    'ppo': rl_runner('ppo'),
}


def execute_run(spec, run):
    seed = spec.seed_for(run)
    started = time.perf_counter()
    result = OPTIMIZERS[spec.algorithm](spec.n_params, spec.total_time, seed, spec.overrides)
    elapsed = (time.perf_counter() - started) * 1000.0 if spec.record_timing else 0.0
    log.debug(f"{spec.algorithm} run {run} seed {seed} fidelity {result.best_fidelity:.6f}")
    if result.best_pulse.n_params != spec.n_params:
        raise DimensionMismatchError(spec.n_params, result.best_pulse.n_params)
    return RunRecord(
        run=run,
        seed=seed,
        amplitudes=list(result.best_pulse.amplitudes),
        fidelity=result.best_fidelity,
        iterations=result.iterations_used,
        converged=result.converged,
        ms=elapsed,
        total_time=result.best_pulse.total_time,
    )


def load_projection(spec):
    if not spec.loadings_path:
        return None
    model = pca.load(spec.loadings_path)
    if model.n_params != spec.n_params:
        raise DimensionMismatchError(spec.n_params, model.n_params)
    return model


def project(records, model):
    if model is None:
        return
    if not records:
        return
    coords = pca.transform(model, [record.amplitudes for record in records])
    for record, (x, y) in zip(records, coords):
        record.pca_xy = (float(x), float(y))


def run_experiment(spec, jobs=1):
    """Run spec.runs independent optimizations, seeds base_seed + i, returned in run order."""
    model = load_projection(spec)
    runs = range(spec.runs)
    log.info(f"Running {spec.runs} {spec.algorithm} runs for {spec.n_params} parameters on {jobs} worker(s)")

    if jobs <= 1 or spec.runs == 1:
        records = [execute_run(spec, run) for run in runs]
    else:
        chunksize = max(1, spec.runs // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            records = list(executor.map(execute_run, [spec] * spec.runs, runs, chunksize=chunksize))
    records.sort(key=lambda record: record.run)
    project(records, model)

    converged = sum(record.converged for record in records)
    high = sum(record.fidelity > constants.HIGH_FIDELITY for record in records)
    log.info(f"Finished {spec.algorithm}: {converged}/{spec.runs} converged, {high}/{spec.runs} above "
             f"{constants.HIGH_FIDELITY}")

    if spec.output_path:
        write_run_records(spec, records, spec.output_path)
    return records


def record_header(n_params):
    return ['run', 'seed'] + [f'a{k + 1}' for k in range(n_params)] + \
        ['fidelity', 'pc1', 'pc2', 'iters', 'converged', 'ms']


def write_run_records(spec, records, path):
    provenance = spec.to_dict()
    provenance.pop('output_path')
    if provenance['loadings_path']:
        provenance['loadings_path'] = os.path.basename(provenance['loadings_path'])

    def rows():
        for record in records:
            x, y = record.pca_xy if record.pca_xy is not None else (None, None)
            yield [record.run, record.seed] + list(record.amplitudes) + \
                [record.fidelity, x, y, record.iterations, record.converged, record.ms]

    count = write_csv(path, 'optimize', provenance, record_header(spec.n_params), rows())
    log.info(f"Wrote {count} run records to {path}")
    return count


def cell(row, header, name, cast):
    try:
        value = row[header.index(name)]
        return cast(value) if value != '' else None
    except ValueError:
        raise SchemaValidationError(name, f"unreadable value in run {row[0]}")


def read_run_records(path, check=True):
    """Read a results CSV and, when `check` is set, re-derive every stored fidelity from its amplitudes."""
    provenance, header, rows = read_csv(path)
    for name in ('run', 'seed', 'fidelity', 'iters', 'converged'):
        if name not in header:
            raise SchemaValidationError(name, f"missing column in {path}")
    names = amplitude_columns(header)
    if not names:
        raise SchemaValidationError('a1', f"no amplitude columns in {path}")
    total_time = float(provenance.get('total_time', constants.DEFAULT_TIME))

    records = []
    for row in rows:
        amplitudes = [cell(row, header, name, float) for name in names]
        if None in amplitudes:
            raise SchemaValidationError(names[amplitudes.index(None)], f"missing amplitude in run {row[0]}")
        pc1 = cell(row, header, 'pc1', float) if 'pc1' in header else None
        pc2 = cell(row, header, 'pc2', float) if 'pc2' in header else None
        record = RunRecord(
            run=cell(row, header, 'run', int),
            seed=cell(row, header, 'seed', int),
            amplitudes=amplitudes,
            fidelity=cell(row, header, 'fidelity', float),
            iterations=cell(row, header, 'iters', int),
            converged=bool(cell(row, header, 'converged', int)),
            ms=(cell(row, header, 'ms', float) or 0.0) if 'ms' in header else 0.0,
            total_time=total_time,
            pca_xy=(pc1, pc2) if pc1 is not None and pc2 is not None else None,
        )
        if check:
            derived = pulse_fidelity(record.pulse)
            if abs(derived - record.fidelity) > RECORD_TOLERANCE:
                raise RecordMismatchError(record.run, record.fidelity, derived)
        records.append(record)
    return records


def fidelity_histogram(records, bins=constants.HISTOGRAM_BINS):
    """Counts over `bins` equal-width bins on [0, 1], fidelity 1 lands in the last bin."""
    if bins < 2:
        raise InvalidArgumentError('bins', bins, "at least 2 bins are required")
    values = np.array([getattr(r, 'fidelity', r) for r in records], dtype=float)
    counts, _ = np.histogram(np.clip(values, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    return counts


def histogram_edges(bins=constants.HISTOGRAM_BINS):
    return np.linspace(0.0, 1.0, bins + 1)
