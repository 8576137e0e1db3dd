from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from conflict.exceptions import ConflictError
from conflict.experiments import SWEEP_FILE, read_sweep
from conflict.plots import emit_plots, plot_network_samples
from conflict.trace import SUMMARY_FILE, Trace

from ._common import parse_list, resolve_config


class Command(BaseCommand):
    help = "Render figures from a persisted scenario directory or sweep table"

    def add_arguments(self, parser):
        parser.add_argument('source', nargs='?', help='Scenario directory, sweep directory or sweep.csv')
        parser.add_argument('--out', help='Where to write the images (default: next to the source)')
        parser.add_argument('--config', help='Config whose synthetic mixture is used for --network-samples')
        parser.add_argument('--network-samples', dest='network_samples',
                            help='Comma separated sigma values for the sample-network panel')

    def handle(self, *args, **options):
        source = Path(options['source']) if options.get('source') else None
        samples = parse_list(options.get('network_samples'), float, '--network-samples')
        if source is None and not samples:
            raise CommandError('Give a source to plot and/or --network-samples')
        out = Path(options['out']) if options.get('out') else None
        written = []
        try:
            if source is not None:
                if not source.exists():
                    raise CommandError(f'{source} does not exist')
                if source.is_file():
                    data, default_out = read_sweep(source), source.parent
                elif (source / SUMMARY_FILE).exists():
                    data, default_out = Trace.read(source), source
                elif (source / SWEEP_FILE).exists():
                    data, default_out = read_sweep(source / SWEEP_FILE), source
                else:
                    raise CommandError(f'{source}: neither a scenario directory nor a sweep')
                out = out or default_out
                written += emit_plots(data, out)
            if samples:
                cfg, _ = resolve_config({'config': options.get('config')})
                if not cfg.network.components:
                    raise CommandError('--network-samples needs a synthetic network config')
                written.append(plot_network_samples(samples, out or Path('.'), cfg.network.components))
        except ConflictError as exc:
            raise CommandError(str(exc))
        except OSError as exc:
            raise CommandError(f'cannot write figures: {exc}')
        for path in written:
            self.stdout.write(str(path))
        self.stdout.write(self.style.SUCCESS(f'Wrote {len(written)} figure(s)'))
