"""Desk-scale homophily sweep; opt in with CONFLICT_SLOW_TESTS=1 (several minutes)."""
import os
import tempfile
import unittest
from pathlib import Path

from django.conf import settings
from django.test import SimpleTestCase

from conflict.config import load_config
from conflict.experiments import METRICS_FILE, MetricsRecord, scenario_dirname, sweep_homophily

SLOW = os.getenv('CONFLICT_SLOW_TESTS') == '1'


@unittest.skipUnless(SLOW, 'set CONFLICT_SLOW_TESTS=1 to run the desk-scale sweep')
class DeskSweepTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.TemporaryDirectory()
        cls.cfg = load_config(Path(settings.BASE_DIR) / 'configs' / 'desk_sweep.conf')
        jobs = int(os.getenv('CONFLICT_SLOW_JOBS', '1'))
        cls.table = sweep_homophily(cls.cfg, [0.1, 1.0, 10.0], jobs=jobs, out=cls.tmp.name)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()
        super().tearDownClass()

    def test_every_scenario_completes(self):
        self.assertEqual(len(self.table), 9)
        self.assertTrue((self.table['error'] == '').all(), self.table['error'].tolist())

    def test_moderate_homophily_is_least_resilient(self):
        medians = self.table.groupby('sigma')['mean_dist_adversary_goal'].median()
        self.assertLess(medians[1.0], medians[0.1])
        self.assertLess(medians[1.0], medians[10.0])

    def test_part_of_the_network_is_captured(self):
        captured = 0
        for seed in self.cfg.seeds:
            metrics = MetricsRecord.from_csv(Path(self.tmp.name) / scenario_dirname(1.0, seed) / METRICS_FILE)
            captured += metrics.final_adversary_bimodality > metrics.initial_adversary_bimodality
        self.assertGreater(captured, len(self.cfg.seeds) / 2)
