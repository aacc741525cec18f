import logging
import logging.config

import click

from qclscape import __version__
from qclscape.commands.analyze import analyze, histogram
from qclscape.commands.landscape import bruteforce, speed_limit
from qclscape.commands.optimize import optimize
from qclscape.commands.pca import pca_fit, pca_transform
from qclscape.commands.pipeline import pipeline
from qclscape.commands.plot import plot
from qclscape.constants import EXIT_OK, EXIT_USAGE
from qclscape.errors import QclError
from qclscape.tasks.config import Config, log_config

log = logging.getLogger(__name__)

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']


@click.group(context_settings={'help_option_names': ['-h', '--help']})
@click.version_option(__version__, prog_name='qclscape')
@click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False), default=None,
              help="Optional `key = value` settings file.")
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None)
@click.option('--jobs', type=click.IntRange(min=1), default=None, help="Worker processes, all cores by default.")
@click.pass_context
def cli(ctx, config_file, log_level, jobs):
    """Quantum control landscapes of a driven two-level system."""
    Config.reset()
    config = Config(config_file)
    logging.config.dictConfig(log_config((log_level or config.root_log_level).upper()))
    ctx.default_map = config.default_map()
    ctx.obj = {'config': config, 'jobs': jobs or config.jobs}


for command in (bruteforce, pca_fit, pca_transform, optimize, analyze, plot, histogram, speed_limit, pipeline):
    cli.add_command(command)


def main(args=None):
    """Run the command line and return its exit code instead of exiting."""
    try:
        cli.main(args=args, prog_name='qclscape', standalone_mode=False)
    except QclError as e:
        log.error(e.format_message())
        e.show()
        return e.exit_code
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    return EXIT_OK
