import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase
from PIL import Image

from conflict.exceptions import NumericError
from conflict.models import ScenarioRecord
from conflict.tests.factories import SMALL


class CommandTestCase(TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)
        self.config = self.root / 'small.conf'
        self.config.write_text(''.join(f'{k}={v}\n' for k, v in SMALL.items()), encoding='utf-8')

    def tearDown(self):
        self.tmp.cleanup()

    def call(self, name, *args, **options):
        out = StringIO()
        call_command(name, *args, stdout=out, stderr=StringIO(), **options)
        return out.getvalue()

    def assertPng(self, path):
        self.assertTrue(path.is_file(), path)
        with Image.open(path) as img:
            self.assertEqual(img.format, 'PNG')
            img.verify()


class RunCommandTests(CommandTestCase):
    def test_run_writes_scenarios_and_records(self):
        output = self.call('run', config=str(self.config), seed='0,1', sigma=0.5, out=str(self.root / 'runs'))
        self.assertIn('sigma=0.5 seed=0', output)
        self.assertIn('sigma=0.5 seed=1', output)
        for seed in (0, 1):
            self.assertTrue((self.root / 'runs' / f'sigma_0.5_seed_{seed}' / 'summary.csv').is_file())
        records = ScenarioRecord.objects.order_by('seed')
        self.assertEqual([r.seed for r in records], [0, 1])
        self.assertTrue(all(r.source == 'run' and not r.failed for r in records))
        self.assertEqual(records[0].sigma, 0.5)
        self.assertIsNotNone(records[0].final_bimodality)

    def test_bad_config_is_a_command_error(self):
        with self.assertRaises(CommandError):
            self.call('run', config=str(self.config), seed='x')
        self.config.write_text('solver.horizn=2\n', encoding='utf-8')
        with self.assertRaises(CommandError):
            self.call('run', config=str(self.config), out=str(self.root))

    def test_failed_run_is_recorded(self):
        with mock.patch('conflict.experiments.receding_horizon_run', side_effect=NumericError('forced')):
            with self.assertRaises(CommandError):
                self.call('run', config=str(self.config), out=str(self.root / 'runs'))
        record = ScenarioRecord.objects.get()
        self.assertTrue(record.failed)
        self.assertIn('forced', record.error)
        self.assertIsNone(record.J_a)


class SweepCommandTests(CommandTestCase):
    def test_sweep(self):
        output = self.call('sweep', config=str(self.config), sigma='2,0.5', out=str(self.root / 'sweep'))
        self.assertIn('Sweep complete: 2 scenario(s)', output)
        lines = (self.root / 'sweep' / 'sweep.csv').read_text().splitlines()
        self.assertEqual(len(lines), 3)
        self.assertTrue(lines[1].startswith('0.5,0,'))
        self.assertEqual(ScenarioRecord.objects.filter(source='sweep').count(), 2)

    def test_failing_sweep_still_saves_rows(self):
        with mock.patch('conflict.experiments.receding_horizon_run', side_effect=NumericError('forced')):
            with self.assertRaises(CommandError):
                self.call('sweep', config=str(self.config), sigma='1', out=str(self.root / 'sweep'))
        self.assertTrue((self.root / 'sweep' / 'sweep.csv').is_file())
        self.assertTrue(ScenarioRecord.objects.get().failed)

    def test_rejects_bad_sigma_list(self):
        with self.assertRaises(CommandError):
            self.call('sweep', config=str(self.config), sigma='1,-2', out=str(self.root))


class PlotCommandTests(CommandTestCase):
    def test_plot_scenario_directory(self):
        self.call('run', config=str(self.config), out=str(self.root / 'runs'))
        scenario = self.root / 'runs' / 'sigma_1_seed_0'
        output = self.call('plot', str(scenario), out=str(self.root / 'figures'))
        self.assertIn('Wrote 3 figure(s)', output)
        for name in ('opinions_scatter.png', 'trajectory_dim_0.png', 'trajectory_dim_1.png'):
            self.assertPng(self.root / 'figures' / name)

    def test_plot_sweep(self):
        self.call('sweep', config=str(self.config), sigma='0.5,2', out=str(self.root / 'sweep'))
        self.call('plot', str(self.root / 'sweep'))
        for metric in ('mean_dist_defender_goal', 'mean_dist_adversary_goal', 'final_bimodality'):
            self.assertPng(self.root / 'sweep' / f'sweep_{metric}.png')

    def test_network_samples(self):
        self.call('plot', config=str(self.config), network_samples='0.1,1,10', out=str(self.root))
        self.assertPng(self.root / 'network_samples.png')

    def test_nothing_to_plot(self):
        with self.assertRaises(CommandError):
            self.call('plot')
        with self.assertRaises(CommandError):
            self.call('plot', str(self.root / 'missing'))
        with self.assertRaises(CommandError):
            self.call('plot', str(self.root))
