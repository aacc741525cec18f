import logging

import click

from qclscape import constants
from qclscape.commands.utils.checks import overrides, positive, supported_params
from qclscape.models import ExperimentSpec
from qclscape.tasks.runner import run_experiment

log = logging.getLogger(__name__)


@click.command()
@click.option('--algo', 'algorithm', type=click.Choice(constants.ALGORITHMS), required=True)
@click.option('--n-params', type=int, required=True, callback=supported_params)
@click.option('--runs', type=click.IntRange(min=1), default=constants.DEFAULT_RUNS)
@click.option('--seed', type=int, default=constants.DEFAULT_SEED, help="Run i uses seed + i.")
@click.option('--time', type=float, default=constants.DEFAULT_TIME, callback=positive)
@click.option('--loadings', type=click.Path(exists=True, dir_okay=False), default=None,
              help="PCA model used to add pc1/pc2 columns.")
@click.option('--out', type=click.Path(dir_okay=False, writable=True), required=True)
@click.option('--timing/--no-timing', default=False, help="Record wall-clock milliseconds per run.")
@click.option('--set', 'settings', multiple=True, callback=overrides, metavar='KEY=VALUE',
              help="Algorithm setting, e.g. --set max_iterations=500 or --set total_steps=5000.")
@click.pass_context
def optimize(ctx, algorithm, n_params, runs, seed, time, loadings, out, timing, settings):
    """Run independent seeded optimizations and write one row per run."""
    spec = ExperimentSpec(
        algorithm=algorithm, n_params=n_params, runs=runs, base_seed=seed, total_time=time,
        loadings_path=loadings, output_path=out, record_timing=timing, overrides=settings,
    )
    records = run_experiment(spec, jobs=ctx.obj['jobs'])
    converged = sum(record.converged for record in records)
    high = sum(record.fidelity > constants.HIGH_FIDELITY for record in records)
    click.echo(f"runs={len(records)} converged={converged} high_fidelity={high}")
