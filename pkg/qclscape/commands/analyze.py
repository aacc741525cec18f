import logging
import os

import click

from qclscape import constants
from qclscape.commands.utils.checks import positive, probability
from qclscape.commands.utils.helpers import load_fidelities, load_points, stem, write_json
from qclscape.models import OverlapSpec
from qclscape.tasks.analysis import cluster_density_index, overlap_counts
from qclscape.tasks.plotting import histogram_svg
from qclscape.tasks.runner import fidelity_histogram, histogram_edges
from qclscape.utils import write_csv

log = logging.getLogger(__name__)


def overlap_path(out):
    root, _ = os.path.splitext(out)
    return f'{root}_overlap.csv'


def analyze_file(input_path, out, eps, min_pts, fidelity_min, overlap, overlap_out=None):
    """Cluster report of the high-fidelity points plus overlap counts of every point."""
    x_name, y_name, points = load_points(input_path)
    high = points[points[:, 2] > fidelity_min]
    params = {'input': stem(input_path), 'x': x_name, 'y': y_name, 'fidelity_min': fidelity_min}
    report = cluster_density_index(high[:, :2], eps, min_pts, params)
    write_json(out, report.summary())

    groups = overlap_counts(points, overlap)
    rows = ([group.x, group.y, group.fidelity, group.count] for group in groups)
    write_csv(overlap_out or overlap_path(out), 'analyze', dict(params, **overlap.to_dict()),
              ['x', 'y', 'fidelity', 'count'], rows)
    return report


@click.command()
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--eps', type=float, default=constants.DBSCAN_EPS, callback=positive)
@click.option('--min-pts', type=click.IntRange(min=1), default=constants.DBSCAN_MIN_PTS)
@click.option('--fidelity-min', type=float, default=constants.HIGH_FIDELITY, callback=probability,
              help="Only points above this fidelity are clustered.")
@click.option('--overlap-xy', type=float, default=constants.OVERLAP_XY, callback=positive)
@click.option('--overlap-fidelity', type=float, default=constants.OVERLAP_FIDELITY, callback=positive)
@click.option('--out', type=click.Path(dir_okay=False, writable=True), required=True, help="Report JSON.")
@click.option('--overlap-out', type=click.Path(dir_okay=False, writable=True), default=None,
              help="Overlap CSV, next to the report by default.")
def analyze(input_path, eps, min_pts, fidelity_min, overlap_xy, overlap_fidelity, out, overlap_out):
    """Cluster density index and overlap counts of a results CSV."""
    report = analyze_file(input_path, out, eps, min_pts, fidelity_min, OverlapSpec(overlap_xy, overlap_fidelity),
                          overlap_out)
    cdi = 'null' if report.cdi is None else f'{report.cdi:.6f}'
    click.echo(f"status={report.status} clusters={report.n_clusters} cdi={cdi}")


def histogram_files(inputs, bins, out, svg=None):
    edges = histogram_edges(bins)
    series = {stem(path): fidelity_histogram(load_fidelities(path), bins) for path in inputs}
    header = ['bin_lo', 'bin_hi'] + list(series)
    rows = ([edges[i], edges[i + 1]] + [int(counts[i]) for counts in series.values()] for i in range(bins))
    write_csv(out, 'histogram', {'bins': bins, 'inputs': list(series)}, header, rows)
    if svg:
        histogram_svg(series, edges, svg)
    return series


@click.command()
@click.option('--input', 'inputs', type=click.Path(exists=True, dir_okay=False), multiple=True, required=True,
              help="Results CSV, repeat for one series per file.")
@click.option('--bins', type=click.IntRange(min=2), default=constants.HISTOGRAM_BINS)
@click.option('--out', type=click.Path(dir_okay=False, writable=True), required=True, help="Counts CSV.")
@click.option('--svg', type=click.Path(dir_okay=False, writable=True), default=None, help="Log-scale plot.")
def histogram(inputs, bins, out, svg):
    """Pulse counts per fidelity bin."""
    series = histogram_files(inputs, bins, out, svg)
    for name, counts in series.items():
        click.echo(f"{name} total={int(counts.sum())} last_bin={int(counts[-1])}")
