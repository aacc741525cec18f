import logging

import click

from qclscape import constants
from qclscape.commands.utils.checks import positive, probability
from qclscape.commands.utils.helpers import load_points
from qclscape.models import OverlapSpec, PlotSpec
from qclscape.tasks.analysis import overlap_counts
from qclscape.tasks.plotting import overlap_svg, scatter_svg

log = logging.getLogger(__name__)


def plot_file(spec, overlap=None):
    x_name, y_name, points = load_points(spec.input_path, spec.x_column or None, spec.y_column or None)
    spec.x_column, spec.y_column = x_name, y_name
    if spec.fidelity_min is not None:
        points = points[points[:, 2] > spec.fidelity_min]

    if spec.overlap:
        groups = overlap_counts(points, overlap)
        overlap_svg(groups, spec)
        return len(groups)
    scatter_svg(points[:, 0], points[:, 1], points[:, 2], spec)
    return len(points)


@click.command()
@click.option('--input', 'input_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False, writable=True), required=True, help="SVG file.")
@click.option('--x', 'x_column', default='', help="Column on the x axis, pc1 or a1 by default.")
@click.option('--y', 'y_column', default='', help="Column on the y axis, pc2 or a2 by default.")
@click.option('--colormap', default=constants.PLOT_COLORMAP)
@click.option('--radius', type=float, default=constants.PLOT_MARKER_RADIUS, callback=positive,
              help="Marker radius in points.")
@click.option('--fidelity-min', type=float, default=None, callback=probability,
              help="Only plot points above this fidelity.")
@click.option('--overlap', is_flag=True, help="Draw overlap groups as circles sized by count.")
@click.option('--overlap-xy', type=float, default=constants.OVERLAP_XY, callback=positive)
@click.option('--overlap-fidelity', type=float, default=constants.OVERLAP_FIDELITY, callback=positive)
@click.option('--title', default='')
def plot(input_path, out, x_column, y_column, colormap, radius, fidelity_min, overlap, overlap_xy,
         overlap_fidelity, title):
    """Fidelity-coloured SVG scatter of a landscape or results CSV."""
    spec = PlotSpec(
        input_path=input_path, output_path=out, x_column=x_column, y_column=y_column, colormap=colormap,
        marker_radius=radius, fidelity_min=fidelity_min, overlap=overlap, title=title,
    )
    count = plot_file(spec, OverlapSpec(overlap_xy, overlap_fidelity))
    click.echo(f"markers={count}")
