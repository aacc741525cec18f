import json

import click

from qclscape import constants


def positive(ctx, param, value):
    '''Reject zero and negative values'''
    if value is not None and value <= 0:
        raise click.BadParameter("must be positive")
    return value


def probability(ctx, param, value):
    if value is not None and not 0 <= value <= 1:
        raise click.BadParameter("must lie in [0, 1]")
    return value


def supported_params(ctx, param, value):
    if value is not None and value not in constants.SUPPORTED_PARAMS:
        raise click.BadParameter(
            f"experiments support {', '.join(str(n) for n in constants.SUPPORTED_PARAMS)} parameters")
    return value


def algorithm_list(ctx, param, value):
    names = [name.strip() for name in value.split(',') if name.strip()]
    unknown = [name for name in names if name not in constants.ALGORITHMS]
    if unknown or not names:
        raise click.BadParameter(f"expected a comma separated subset of {', '.join(constants.ALGORITHMS)}")
    return names


def overrides(ctx, param, values):
    '''Parse repeated KEY=VALUE options, values read as JSON when possible'''
    parsed = {}
    for item in values:
        if '=' not in item:
            raise click.BadParameter(f"`{item}` is not KEY=VALUE")
        key, raw = item.split('=', 1)
        try:
            parsed[key.strip().replace('-', '_')] = json.loads(raw)
        except ValueError:
            parsed[key.strip().replace('-', '_')] = raw
    return parsed
