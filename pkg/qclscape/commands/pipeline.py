import logging
import os

import click

from qclscape import constants
from qclscape.commands.analyze import analyze_file, histogram_files
from qclscape.commands.plot import plot_file
from qclscape.commands.utils.checks import algorithm_list, overrides, positive, probability, supported_params
from qclscape.models import ExperimentSpec, GridSpec, OverlapSpec, PlotSpec
from qclscape.tasks import pca
from qclscape.tasks.analysis import CDI_TABLE_HEADER, cdi_table
from qclscape.tasks.landscape import grid_arrays, write_grid_csv
from qclscape.tasks.plotting import scatter_svg
from qclscape.tasks.runner import overrides_for, run_experiment
from qclscape.utils import write_csv

log = logging.getLogger(__name__)


def landscape_plot(model, amplitudes, fidelities, fidelity_min, path, n_params):
    high = fidelities > fidelity_min
    coords = pca.transform(model, amplitudes[high])
    spec = PlotSpec(input_path='', output_path=path, fidelity_min=fidelity_min,
                    title=f'{n_params}-parameter landscape, fidelity > {fidelity_min}')
    scatter_svg(coords[:, 0], coords[:, 1], fidelities[high], spec)


@click.command()
@click.option('--n-params', type=int, required=True, callback=supported_params)
@click.option('--algos', default=','.join(constants.ALGORITHMS), callback=algorithm_list,
              help="Comma separated algorithms to run.")
@click.option('--workdir', type=click.Path(file_okay=False), required=True)
@click.option('--runs', type=click.IntRange(min=1), default=constants.DEFAULT_RUNS)
@click.option('--seed', type=int, default=constants.DEFAULT_SEED)
@click.option('--grid', type=int, default=None)
@click.option('--time', type=float, default=constants.DEFAULT_TIME, callback=positive)
@click.option('--max-points', type=click.IntRange(min=1), default=constants.GRID_MAX_POINTS)
@click.option('--eps', type=float, default=constants.DBSCAN_EPS, callback=positive)
@click.option('--min-pts', type=click.IntRange(min=1), default=constants.DBSCAN_MIN_PTS)
@click.option('--fidelity-min', type=float, default=constants.HIGH_FIDELITY, callback=probability)
@click.option('--overlap-xy', type=float, default=constants.OVERLAP_XY, callback=positive)
@click.option('--overlap-fidelity', type=float, default=constants.OVERLAP_FIDELITY, callback=positive)
@click.option('--bins', type=click.IntRange(min=2), default=constants.HISTOGRAM_BINS)
@click.option('--timing/--no-timing', default=False)
@click.option('--set', 'settings', multiple=True, callback=overrides, metavar='KEY=VALUE',
              help="Algorithm setting applied to every algorithm that has it.")
@click.pass_context
def pipeline(ctx, n_params, algos, workdir, runs, seed, grid, time, max_points, eps, min_pts, fidelity_min,
             overlap_xy, overlap_fidelity, bins, timing, settings):
    """Grid, PCA, optimizers, cluster analysis and plots in one go."""
    jobs = ctx.obj['jobs']
    os.makedirs(workdir, exist_ok=True)

    def path(name):
        return os.path.join(workdir, name)

    spec = GridSpec(n_params, grid or ctx.obj['config'].grid_points(n_params))
    amplitudes, fidelities = grid_arrays(spec, time, max_points, jobs)
    write_grid_csv(spec, time, path(f'grid_{n_params}.csv'), threshold=fidelity_min, arrays=(amplitudes, fidelities))
    model = pca.fit(amplitudes)
    loadings = path(f'loadings_{n_params}.json')
    pca.save(model, loadings)
    landscape_plot(model, amplitudes, fidelities, fidelity_min, path(f'landscape_{n_params}.svg'), n_params)

    overlap = OverlapSpec(overlap_xy, overlap_fidelity)
    reports = {}
    results = []
    for algorithm in algos:
        tag = f'{algorithm}_{n_params}'
        output = path(f'results_{tag}.csv')
        experiment = ExperimentSpec(
            algorithm=algorithm, n_params=n_params, runs=runs, base_seed=seed, total_time=time,
            loadings_path=loadings, output_path=output, record_timing=timing,
            overrides=overrides_for(algorithm, settings),
        )
        run_experiment(experiment, jobs=jobs)
        results.append(output)

        reports[(algorithm, n_params)] = analyze_file(
            output, path(f'report_{tag}.json'), eps, min_pts, fidelity_min, overlap)
        plot_file(PlotSpec(input_path=output, output_path=path(f'results_{tag}.svg'), x_column='', y_column='',
                           title=f'{algorithm.upper()} results'))
        plot_file(PlotSpec(input_path=output, output_path=path(f'overlap_{tag}.svg'), x_column='', y_column='',
                           overlap=True, title=f'{algorithm.upper()} overlap counts'), overlap)

    histogram_files(results, bins, path(f'histogram_{n_params}.csv'), path(f'histogram_{n_params}.svg'))
    rows = cdi_table(reports)
    write_csv(path('cdi_table.csv'), 'pipeline', {'n_params': n_params, 'runs': runs, 'seed': seed, 'algos': algos},
              CDI_TABLE_HEADER, rows)
    for row in rows:
        cdi = 'null' if row[6] is None else f'{row[6]:.6f}'
        click.echo(f"{row[0]} n_params={row[1]} clusters={row[2]} cdi={cdi} status={row[7]}")
