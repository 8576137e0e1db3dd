import math

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from conflict.exceptions import ConflictError
from conflict.experiments import SWEEP_FILE, scenario_dirname, sweep_homophily
from conflict.models import ScenarioRecord

from ._common import add_config_arguments, parse_list, resolve_config


class Command(BaseCommand):
    help = "Sweep the homophily coefficient over every seed and write a consolidated sweep.csv"

    def add_arguments(self, parser):
        add_config_arguments(parser)
        parser.add_argument('--sigma', help='Comma separated sigma values (overrides run.sigmas)')
        parser.add_argument('--jobs', type=int, default=getattr(settings, 'CONFLICT_DEFAULT_JOBS', 1),
                            help='Scenarios run in parallel (default from settings)')

    def handle(self, *args, **options):
        cfg, out = resolve_config(options)
        sigmas = (parse_list(options.get('sigma'), float, '--sigma') or cfg.sigmas
                  or list(getattr(settings, 'CONFLICT_DEFAULT_SIGMAS', [1.0])))
        try:
            table = sweep_homophily(cfg, sigmas, jobs=options['jobs'], out=out)
        except ConflictError as exc:
            raise CommandError(str(exc))

        records = []
        for row in table.to_dict('records'):
            records.append(ScenarioRecord.from_row(
                row, source='sweep', config_path=options.get('config') or '',
                output_dir=str(out / scenario_dirname(row['sigma'], int(row['seed']))),
            ))
            if row['error']:
                self.stdout.write(self.style.WARNING(f"sigma={row['sigma']:g} seed={int(row['seed'])}: {row['error']}"))
            else:
                bimodality = row['final_bimodality']
                self.stdout.write(
                    f"sigma={row['sigma']:g} seed={int(row['seed'])}: "
                    f"defender {row['mean_dist_defender_goal']:.4f} adversary {row['mean_dist_adversary_goal']:.4f} "
                    f"bimodality {'n/a' if math.isnan(bimodality) else f'{bimodality:.4f}'}"
                )
        ScenarioRecord.objects.bulk_create(records)

        failed = int((table['error'] != '').sum())
        if failed:
            raise CommandError(f'{failed} of {len(table)} scenario(s) failed; see {out / SWEEP_FILE}')
        self.stdout.write(self.style.SUCCESS(f'Sweep complete: {len(table)} scenario(s) -> {out / SWEEP_FILE}'))
