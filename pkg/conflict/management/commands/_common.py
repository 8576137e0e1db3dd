"""Flags shared by the run/sweep/plot commands."""
from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from conflict.config import load_config
from conflict.exceptions import ConfigError


def parse_list(text, cast, flag):
    if text is None:
        return None
    try:
        values = [cast(part) for part in str(text).split(',') if part.strip()]
    except ValueError:
        raise CommandError(f'{flag}: expected a comma separated list, got {text!r}')
    if not values:
        raise CommandError(f'{flag}: empty list')
    return values


def add_config_arguments(parser):
    parser.add_argument('--config', help='Experiment config file (flat section.key=value lines)')
    parser.add_argument('--seed', help='Seed or comma separated seeds (overrides run.seeds)')
    parser.add_argument('--out', help='Output directory (default: run.output_dir, then CONFLICT_OUTPUT_ROOT)')


def resolve_config(options, sigma=None):
    """Config file with the command-line flags applied on top."""
    overrides = {}
    seeds = parse_list(options.get('seed'), int, '--seed')
    if seeds is not None:
        overrides['run.seeds'] = ','.join(str(s) for s in seeds)
    if sigma is not None:
        overrides['kernel.sigma'] = repr(float(sigma))
    if options.get('out'):
        overrides['run.output_dir'] = options['out']
    try:
        cfg = load_config(options.get('config'), overrides)
    except ConfigError as exc:
        raise CommandError(str(exc))
    out = cfg.output_dir or Path(getattr(settings, 'CONFLICT_OUTPUT_ROOT', 'runs'))
    return cfg, Path(out)
