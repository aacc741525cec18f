import logging
import os

import numpy as np

from qclscape.errors import SchemaValidationError
from qclscape.utils import columns_as_array, dump_json, read_csv

log = logging.getLogger(__name__)


def stem(path):
    return os.path.splitext(os.path.basename(path))[0]


def write_json(path, data):
    with open(path, 'w') as handle:
        handle.write(dump_json(data))


def choose_axes(header, x_column=None, y_column=None):
    """Explicit columns, else PCA coordinates, else the first two amplitudes."""
    if x_column and y_column:
        pair = (x_column, y_column)
    elif 'pc1' in header and 'pc2' in header:
        pair = ('pc1', 'pc2')
    elif 'a1' in header and 'a2' in header:
        pair = ('a1', 'a2')
    else:
        raise SchemaValidationError('pc1', "no coordinate columns, run pca-transform first")
    for name in pair:
        if name not in header:
            raise SchemaValidationError(name, "missing column")
    return pair


def load_points(path, x_column=None, y_column=None):
    """Return (x name, y name, rows of x, y, fidelity), every row carrying both coordinates."""
    _, header, rows = read_csv(path)
    if not rows:
        return x_column or 'pc1', y_column or 'pc2', np.empty((0, 3))

    x_name, y_name = choose_axes(header, x_column, y_column)
    if 'fidelity' not in header:
        raise SchemaValidationError('fidelity', "missing column")
    if not (x_column and y_column) and x_name == 'pc1' and 'a2' in header \
            and all(row[header.index('pc1')] == '' for row in rows):
        log.info(f"{path} carries no PCA coordinates, using a1/a2")
        x_name, y_name = 'a1', 'a2'
    try:
        data = columns_as_array(header, rows, [x_name, y_name, 'fidelity'])
    except ValueError as e:
        raise SchemaValidationError(x_name, f"unreadable number ({e})")

    missing = ~np.all(np.isfinite(data), axis=1)
    if missing.any():
        raise SchemaValidationError(x_name, f"{int(missing.sum())} rows of {path} lack {x_name}/{y_name}/fidelity")
    return x_name, y_name, data


def load_fidelities(path):
    _, header, rows = read_csv(path)
    if not rows:
        return np.empty(0)
    if 'fidelity' not in header:
        raise SchemaValidationError('fidelity', "missing column")
    try:
        return columns_as_array(header, rows, ['fidelity'])[:, 0]
    except ValueError as e:
        raise SchemaValidationError('fidelity', f"unreadable number ({e})")
