import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from conflict.exceptions import InvalidArgumentError
from conflict.graph_model import KERNEL_FLOOR, KernelConfig, Population, weight_matrix
from conflict.influence_dynamics import (
    DynamicsParams,
    MessagePair,
    accumulated_evidence,
    decay_weight,
    exposure_probabilities,
    opinion_step,
    opinion_update,
    propagate_micro,
    seeded_exposure,
    seeded_exposure_probabilities,
    sigmoid,
)
from conflict.tests.factories import random_population


def _random_instance(rng, n):
    w = weight_matrix(rng.standard_normal((n, 2)), KernelConfig(sigma=float(rng.uniform(0.3, 3.0))))
    return w, rng.uniform(0, 1, n), rng.uniform(0, 1, n)


class ExposureTests(SimpleTestCase):
    def test_message_on_everyone(self):
        p = Population.from_opinions(np.tile([0.3, -0.2], (5, 1)))
        assert_array_equal(exposure_probabilities([0.3, -0.2], p, KernelConfig()), np.ones(5))

    def test_far_message_hits_floor(self):
        p = Population.from_opinions([[0.0, 0.0], [1.0, 0.0]])
        assert_array_equal(exposure_probabilities([1e6, 0.0], p, KernelConfig(sigma=0.1)), [KERNEL_FLOOR] * 2)

    def test_two_individuals(self):
        p = Population.from_opinions([[0.0, 0.0], [1.0, 0.0]])
        assert_allclose(exposure_probabilities([0.0, 0.0], p, KernelConfig(sigma=1.0)), [1.0, math.exp(-0.5)])

    def test_dimension_mismatch(self):
        p = Population.from_opinions([[0.0, 0.0], [1.0, 0.0]])
        with self.assertRaises(InvalidArgumentError):
            exposure_probabilities([0.0], p, KernelConfig())


class MicroDiffusionTests(SimpleTestCase):
    def test_symmetric_forcing_cancels(self):
        rng = np.random.default_rng(1)
        w, p, _ = _random_instance(rng, 8)
        ys = propagate_micro(w, p, p, DynamicsParams(kappa_a=0.7, kappa_d=0.7), s_max=20)
        assert_array_equal(ys, np.zeros_like(ys))
        assert_array_equal(accumulated_evidence(w, p, p, DynamicsParams(kappa_a=0.7, kappa_d=0.7)), np.zeros(8))

    def test_no_sharing_single_step(self):
        rng = np.random.default_rng(2)
        w, p_a, p_d = _random_instance(rng, 6)
        ys = propagate_micro(w, p_a, p_d, DynamicsParams(alpha=0.0), s_max=1)
        assert_allclose(ys[1], p_d - p_a, rtol=0, atol=1e-15)

    def test_no_sharing_closed_form(self):
        rng = np.random.default_rng(3)
        w, p_a, p_d = _random_instance(rng, 6)
        dp = DynamicsParams(alpha=0.0, kappa_a=0.4, kappa_d=1.1)
        expected = p_d * math.exp(-1.1) / (1 - math.exp(-1.1)) - p_a * math.exp(-0.4) / (1 - math.exp(-0.4))
        assert_allclose(accumulated_evidence(w, p_a, p_d, dp), expected, rtol=1e-12)

    def test_closed_form_matches_series(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            n = int(rng.integers(2, 51))
            w, p_a, p_d = _random_instance(rng, n)
            dp = DynamicsParams(alpha=float(rng.uniform(0.05, 0.9)), kappa_a=float(rng.uniform(0.1, 2.0)),
                                kappa_d=float(rng.uniform(0.1, 2.0)))
            series = propagate_micro(w, p_a, p_d, dp, s_max=500, forcing_start=1).sum(axis=0)
            closed = accumulated_evidence(w, p_a, p_d, dp)
            self.assertLess(np.linalg.norm(series - closed) / np.linalg.norm(closed), 1e-8)

    def test_swapping_players_negates(self):
        rng = np.random.default_rng(5)
        w, p_a, p_d = _random_instance(rng, 10)
        forward = accumulated_evidence(w, p_a, p_d, DynamicsParams(kappa_a=0.3, kappa_d=1.2))
        swapped = accumulated_evidence(w, p_d, p_a, DynamicsParams(kappa_a=1.2, kappa_d=0.3))
        assert_array_equal(forward, -swapped)

    def test_decay_weight(self):
        self.assertAlmostEqual(decay_weight(0.5), math.exp(-0.5) / (1 - math.exp(-0.5)), places=14)


class OpinionUpdateTests(SimpleTestCase):
    def test_sigmoid(self):
        dp = DynamicsParams()
        self.assertEqual(float(sigmoid(0.0, dp)), 0.5)
        self.assertAlmostEqual(float(sigmoid(-2.0, dp)), 1 - float(sigmoid(2.0, dp)), places=15)
        self.assertEqual(float(sigmoid(1e6, dp)), 1.0)
        self.assertEqual(float(sigmoid(-1e6, dp)), 0.0)

    def test_fixed_point_without_learning(self):
        rng = np.random.default_rng(6)
        p = Population(rng.standard_normal((12, 2)), rng.standard_normal((12, 2)))
        msgs = MessagePair([3.0, -1.0], [0.5, 0.5])
        nxt = opinion_step(p, msgs, DynamicsParams(eta=0.0, stubbornness=1.0), KernelConfig())
        assert_array_equal(nxt.opinions, p.opinions)
        assert_array_equal(nxt.initial_opinions, p.initial_opinions)

    def test_contraction_to_initial(self):
        rng = np.random.default_rng(7)
        p = Population(rng.standard_normal((12, 2)), rng.standard_normal((12, 2)))
        dp = DynamicsParams(eta=0.0, stubbornness=0.7)
        msgs = MessagePair([1.0, 1.0], [0.0, 0.0])
        gaps = []
        for _ in range(40):
            nxt = opinion_step(p, msgs, dp, KernelConfig())
            assert_allclose(nxt.opinions, 0.3 * p.initial_opinions + 0.7 * p.opinions, rtol=1e-14, atol=1e-14)
            p = nxt
            gaps.append(np.linalg.norm(p.opinions - p.initial_opinions))
        self.assertTrue(all(b < a for a, b in zip(gaps, gaps[1:])))
        self.assertLess(gaps[-1], 1e-5)

    def test_saturated_evidence_moves_to_defender(self):
        dp = DynamicsParams(stubbornness=1.0, eta=0.5)
        out = opinion_update(np.array([[0.0]]), np.array([[0.0]]), np.array([100.0]), MessagePair([-0.5], [0.8]), dp)
        self.assertAlmostEqual(float(out[0, 0]), 0.8, delta=1e-6)

    def test_unclamped_rate_overshoots(self):
        dp = DynamicsParams(stubbornness=1.0, eta=0.5, clamp_rate=False)
        out = opinion_update(np.array([[0.0]]), np.array([[0.0]]), np.array([100.0]), MessagePair([-0.5], [0.8]), dp)
        self.assertGreater(float(out[0, 0]), 0.8)

    def test_message_validation(self):
        with self.assertRaises(InvalidArgumentError):
            MessagePair([1.0, 0.0], [1.0])
        with self.assertRaises(InvalidArgumentError):
            MessagePair([np.nan], [1.0])
        with self.assertRaises(InvalidArgumentError):
            DynamicsParams(alpha=1.0)


class EvidencePropertyTests(SimpleTestCase):
    def test_more_defender_exposure_never_lowers_evidence(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            n = int(rng.integers(2, 30))
            w, p_a, p_d = _random_instance(rng, n)
            dp = DynamicsParams(alpha=float(rng.uniform(0.05, 0.9)))
            base = accumulated_evidence(w, p_a, p_d, dp)
            for i in range(n):
                raised = p_d.copy()
                raised[i] += float(rng.uniform(0.01, 1.0))
                self.assertTrue(np.all(accumulated_evidence(w, p_a, raised, dp) >= base - 1e-12))

    def test_opinions_stay_in_a_box(self):
        rng = np.random.default_rng(9)
        for exposure in ('kernel', 'seeded'):
            for _ in range(20):
                n = int(rng.integers(2, 25))
                p = Population(rng.uniform(-1, 1, (n, 2)), rng.uniform(-1, 1, (n, 2)))
                msgs = MessagePair(rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2))
                dp = DynamicsParams(eta=float(rng.uniform(0, 5)), stubbornness=float(rng.uniform(0, 1)),
                                    exposure=exposure)
                nxt = opinion_step(p, msgs, dp, KernelConfig(sigma=float(rng.uniform(0.2, 3.0))))
                self.assertTrue(np.all(np.abs(nxt.opinions) <= 1.0 + 1e-12))


class SeededExposureTests(SimpleTestCase):
    def test_hand_evaluation_on_a_line(self):
        def psi(a, b):
            return math.exp(-((a - b) ** 2) / 2)

        p = Population.from_opinions([[0.0], [1.0], [3.0]])
        seeds = np.array([psi(0, 0), psi(0, 1), psi(0, 3)])
        seeds = seeds / seeds.mean()
        rows = [
            [0.0, psi(0, 1), psi(0, 3)],
            [psi(1, 0), 0.0, psi(1, 3)],
            [psi(3, 0), psi(3, 1), 0.0],
        ]
        expected = [np.dot(row, seeds) / sum(row) for row in rows]
        assert_allclose(seeded_exposure_probabilities([0.0], p, KernelConfig(sigma=1.0)), expected, rtol=1e-12)

    def test_even_seeding_on_a_flat_kernel(self):
        rng = np.random.default_rng(10)
        p = random_population(rng, 12, 2)
        for u in ([0.0, 0.0], [5.0, -3.0], [40.0, 40.0]):
            assert_allclose(seeded_exposure_probabilities(u, p, KernelConfig(sigma=1e8)), np.ones(12), rtol=0, atol=1e-12)

    def test_mass_weighted_seeding_is_even_for_uniform_seeds(self):
        rng = np.random.default_rng(11)
        centres = rng.standard_normal((5, 2))
        masses = np.array([1.0, 4.0, 2.0, 7.0, 3.0])
        k = KernelConfig(sigma=1e8)
        w = weight_matrix(centres, k, masses)
        assert_allclose(seeded_exposure(np.array([3.0, 3.0]), centres, w, k, masses), np.ones(5), rtol=0, atol=1e-12)

    def test_far_messages_cancel_on_a_wide_kernel(self):
        rng = np.random.default_rng(12)
        p = random_population(rng, 30, 2)
        msgs = MessagePair([-20.0, 0.0], [0.0, 0.0])
        k = KernelConfig(sigma=50.0)
        kernel_step = opinion_step(p, msgs, DynamicsParams(stubbornness=1.0), k)
        seeded_step = opinion_step(p, msgs, DynamicsParams(stubbornness=1.0, exposure='seeded'), k)
        self.assertLess(float((kernel_step.opinions - p.opinions)[:, 0].mean()), -0.5)
        self.assertLess(float(np.abs(seeded_step.opinions - p.opinions).max()), 0.02)

    def test_unknown_model(self):
        with self.assertRaises(InvalidArgumentError):
            DynamicsParams(exposure='broadcast')
