import logging

import click
import numpy as np

from qclscape.commands.utils.helpers import stem
from qclscape.errors import SchemaValidationError
from qclscape.tasks import pca
from qclscape.utils import amplitude_columns, columns_as_array, read_csv, write_csv

log = logging.getLogger(__name__)


def read_amplitudes(path):
    _, header, rows = read_csv(path)
    names = amplitude_columns(header)
    if not names:
        raise SchemaValidationError('a1', f"no amplitude columns in {path}")
    try:
        data = columns_as_array(header, rows, names)
    except ValueError as e:
        raise SchemaValidationError(names[0], f"unreadable number ({e})")
    missing = ~np.all(np.isfinite(data), axis=1)
    if missing.any():
        raise SchemaValidationError(names[0], f"{int(missing.sum())} rows of {path} have missing amplitudes")
    return header, rows, names, data


def fit_file(input_path, out):
    _, _, _, data = read_amplitudes(input_path)
    model = pca.fit(data)
    pca.save(model, out)
    return model, pca.explained_variance_ratio(model, data)


def transform_file(model_path, input_path, out):
    """Append (or refresh) pc1 and pc2 columns."""
    model = pca.load(model_path)
    header, rows, names, data = read_amplitudes(input_path)
    pca.check_dimension(model, np.zeros((1, len(names))))

    coords = pca.transform(model, data) if len(rows) else np.empty((0, 2))

    kept = [i for i, name in enumerate(header) if name not in ('pc1', 'pc2')]
    fidelity_at = [header[i] for i in kept].index('fidelity') + 1 if 'fidelity' in header else len(kept)
    out_header = [header[i] for i in kept]
    out_header[fidelity_at:fidelity_at] = ['pc1', 'pc2']

    def out_rows():
        for row, (x, y) in zip(rows, coords):
            cells = [row[i] for i in kept]
            cells[fidelity_at:fidelity_at] = [x, y]
            yield cells

    provenance = {'model': stem(model_path), 'input': stem(input_path)}
    count = write_csv(out, 'pca-transform', provenance, out_header, out_rows())
    log.info(f"Projected {count} rows into {out}")
    return count


@click.command('pca-fit')
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True,
              help="Grid or results CSV with a1..aN columns.")
@click.option('--out', type=click.Path(dir_okay=False, writable=True), required=True, help="Model JSON.")
def pca_fit(input_path, out):
    """Fit two principal components to amplitude data."""
    model, (first, second) = fit_file(input_path, out)
    click.echo(f"n_params={model.n_params} explained_variance_ratio={first:.6f},{second:.6f}")


@click.command('pca-transform')
@click.option('--model', 'model_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False, writable=True), required=True)
def pca_transform(model_path, input_path, out):
    """Project amplitude rows onto a saved model."""
    count = transform_file(model_path, input_path, out)
    click.echo(f"rows={count}")
