from django.core.management.base import BaseCommand, CommandError

from conflict.experiments import run_scenario, scenario_dirname
from conflict.exceptions import ScenarioError
from conflict.models import ScenarioRecord

from ._common import add_config_arguments, resolve_config


class Command(BaseCommand):
    help = "Play the receding-horizon influence game for one sigma and each configured seed"

    def add_arguments(self, parser):
        add_config_arguments(parser)
        parser.add_argument('--sigma', type=float, help='Homophily coefficient (overrides kernel.sigma)')

    def handle(self, *args, **options):
        cfg, out = resolve_config(options, sigma=options.get('sigma'))
        sigma = cfg.kernel.sigma
        failed = 0
        for seed in cfg.seeds:
            target = out / scenario_dirname(sigma, seed)
            try:
                trace, metrics = run_scenario(cfg, seed, out)
            except ScenarioError as exc:
                failed += 1
                self.stderr.write(str(exc))
                ScenarioRecord.objects.create(
                    source='run', sigma=sigma, seed=seed, error=str(exc),
                    config_path=options.get('config') or '', output_dir=str(target),
                )
                continue
            ScenarioRecord.from_row(
                metrics.sweep_row(), source='run', config_path=options.get('config') or '', output_dir=str(target),
            ).save()
            line = (
                f"sigma={sigma:g} seed={seed}: {trace.steps} steps, "
                f"defender dist {metrics.mean_dist_defender_goal:.4f}, "
                f"adversary dist {metrics.mean_dist_adversary_goal:.4f}, "
                f"bimodality {metrics.final_bimodality:.4f}, J_a={metrics.J_a:.4g}, J_d={metrics.J_d:.4g} -> {target}"
            )
            if metrics.valid:
                self.stdout.write(self.style.SUCCESS(line))
            else:
                failed += 1
                self.stdout.write(self.style.WARNING(f"{line} (aborted: {metrics.error})"))
        if failed:
            raise CommandError(f'{failed} of {len(cfg.seeds)} scenario(s) failed')
