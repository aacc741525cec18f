import logging

import click

from qclscape import constants
from qclscape.commands.utils.checks import positive, probability
from qclscape.models import GridSpec
from qclscape.qdyn import estimate_speed_limit
from qclscape.tasks.landscape import write_grid_csv

log = logging.getLogger(__name__)


@click.command()
@click.option('--n-params', type=int, required=True, help="Number of pulse segments N.")
@click.option('--grid', type=int, default=None, help="Points per axis, 101 by default and 31 for N = 4.")
@click.option('--time', type=float, default=constants.DEFAULT_TIME, callback=positive, help="Total evolution time T.")
@click.option('--threshold', type=float, default=constants.HIGH_FIDELITY, callback=probability,
              help="Fidelity reported as high in the summary.")
@click.option('--out', type=click.Path(dir_okay=False, writable=True), required=True, help="CSV sink.")
@click.pass_context
def bruteforce(ctx, n_params, grid, time, threshold, out):
    """Evaluate every pulse on a regular amplitude grid."""
    config = ctx.obj['config']
    spec = GridSpec(n_params, grid or config.grid_points(n_params))
    summary = write_grid_csv(spec, time, out, jobs=ctx.obj['jobs'], threshold=threshold)
    click.echo(f"points={summary.count} max_fidelity={summary.max_fidelity:.12f} "
               f"high_fidelity_fraction={summary.high_fidelity_fraction:.12f}")


@click.command('speed-limit')
@click.option('--max-time', type=float, default=constants.SPEED_LIMIT_MAX_TIME, callback=positive,
              help="Largest scanned time.")
@click.option('--scan-points', type=click.IntRange(min=1), default=constants.SPEED_LIMIT_SCAN_POINTS,
              help="Number of scanned times, T_k = k * max_time / scan_points.")
@click.option('--segments', type=click.IntRange(min=1), default=constants.SPEED_LIMIT_SEGMENTS,
              help="Pulse segments used by the inner search.")
@click.option('--threshold', type=float, default=constants.SPEED_LIMIT_FIDELITY, callback=probability)
@click.option('--seed', type=int, default=constants.DEFAULT_SEED)
def speed_limit(max_time, scan_points, segments, threshold, seed):
    """Estimate the shortest time reaching the fidelity threshold."""
    t_min = estimate_speed_limit(max_time, scan_points, segments, seed, threshold)
    click.echo(f"t_min={t_min:.12f} recommended_time={2 * t_min:.12f}")
