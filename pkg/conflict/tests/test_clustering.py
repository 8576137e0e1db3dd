import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from conflict.clustering import (
    ClusterAssignment,
    ClusteringConfig,
    bimodality_coefficient,
    cluster_stats,
    compact_labels,
    initial_clustering,
    merge_clusters,
    reduce,
    refresh,
    should_merge,
    split_clusters,
    ward_labels,
)
from conflict.exceptions import DegenerateReductionError, InvalidArgumentError, UndefinedStatisticError
from conflict.graph_model import KernelConfig, Population, build_weight_matrix, check_weight_matrix


class BimodalityTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_normal(self):
        self.assertAlmostEqual(bimodality_coefficient(self.rng.standard_normal(10_000)), 1 / 3, delta=0.05)

    def test_uniform(self):
        self.assertAlmostEqual(bimodality_coefficient(self.rng.uniform(size=10_000)), 5 / 9, delta=0.05)

    def test_balanced_two_point(self):
        self.assertAlmostEqual(bimodality_coefficient(np.repeat([-2.0, 5.0], 500)), 1.0, delta=1e-6)

    def test_affine_invariance(self):
        x = self.rng.gamma(2.0, size=500)
        self.assertAlmostEqual(bimodality_coefficient(x), bimodality_coefficient(-3.0 * x + 7.0), places=10)

    def test_undefined_cases(self):
        with self.assertRaises(UndefinedStatisticError):
            bimodality_coefficient([1.0, 2.0, 3.0])
        with self.assertRaises(UndefinedStatisticError):
            bimodality_coefficient(np.full(10, 4.2))


class WardTests(SimpleTestCase):
    def test_exact_cluster_count(self):
        rng = np.random.default_rng(1)
        points = rng.standard_normal((40, 2))
        for k in (1, 2, 5, 17, 40):
            labels = ward_labels(points, k)
            self.assertEqual(len(set(labels.tolist())), k)
            self.assertEqual(int(labels.max()), k - 1)

    def test_ties_still_give_exact_count(self):
        labels = ward_labels(np.zeros((6, 1)), 3)
        self.assertEqual(np.bincount(labels).size, 3)

    def test_separated_groups(self):
        points = np.array([[0.0], [0.1], [0.2], [10.0], [10.1], [10.2]])
        assert_array_equal(ward_labels(points, 2), [0, 0, 0, 1, 1, 1])

    def test_initial_clustering_bounds(self):
        p = Population.from_opinions(np.arange(5.0))
        self.assertEqual(initial_clustering(p, 5).m, 5)
        with self.assertRaises(InvalidArgumentError):
            initial_clustering(p, 6)
        with self.assertRaises(InvalidArgumentError):
            initial_clustering(p, 0)

    def test_compact_labels(self):
        assert_array_equal(compact_labels(np.array([7, 7, 2, 9, 2])), [0, 0, 1, 2, 1])

    def test_assignment_rejects_gaps(self):
        with self.assertRaises(InvalidArgumentError):
            ClusterAssignment(np.array([0, 2, 2]))


class SplitMergeTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(2)
        self.rng = rng
        side = rng.integers(0, 2, 500)
        self.side = side
        self.mixture = Population.from_opinions((np.where(side == 1, 3.0, -3.0) + rng.standard_normal(500))[:, None])

    def test_bimodal_cluster_splits(self):
        a = split_clusters(ClusterAssignment(np.zeros(500, dtype=int)), self.mixture, 0.55)
        self.assertEqual(a.m, 2)
        means = sorted(self.mixture.opinions[a.labels == c, 0].mean() for c in range(2))
        self.assertLess(means[0], -2.5)
        self.assertGreater(means[1], 2.5)

    def test_unimodal_cluster_stays(self):
        p = Population.from_opinions(self.rng.standard_normal((400, 2)))
        self.assertEqual(split_clusters(ClusterAssignment(np.zeros(400, dtype=int)), p, 0.55).m, 1)

    def test_small_clusters_never_split(self):
        p = Population.from_opinions([[0.0], [0.0], [9.0], [9.0], [4.0]])
        a = ClusterAssignment(np.array([0, 0, 0, 1, 1]))
        assert_array_equal(split_clusters(a, p, 0.55).labels, a.labels)

    def test_close_pair_merges(self):
        x = np.concatenate([self.rng.standard_normal(250) - 0.25, self.rng.standard_normal(250) + 0.25])
        p = Population.from_opinions(x[:, None])
        labels = np.repeat([0, 1], 250)
        self.assertTrue(should_merge(cluster_stats(x[labels == 0, None]), cluster_stats(x[labels == 1, None]), 1e-9))
        self.assertEqual(merge_clusters(ClusterAssignment(labels), p, 1e-9).m, 1)

    def test_split_then_move_then_merge(self):
        a = split_clusters(ClusterAssignment(np.zeros(500, dtype=int)), self.mixture, 0.55)
        x = self.mixture.opinions[:, 0].copy()
        for c in range(2):
            rows = a.labels == c
            x[rows] += (0.25 if x[rows].mean() > 0 else -0.25) - x[rows].mean()
        merged = merge_clusters(a, Population.from_opinions(x[:, None]), 1e-9)
        self.assertEqual(merged.m, 1)

    def test_no_mergeable_pair_remains(self):
        p = Population.from_opinions(np.concatenate([
            self.rng.normal(c, 0.4, (60, 2)) for c in ((0, 0), (0.3, 0.2), (4, 4), (4.2, 4.1), (-5, 3))
        ]))
        merged = merge_clusters(initial_clustering(p, 12), p, 1e-9)
        stats = [cluster_stats(p.opinions[merged.labels == c]) for c in range(merged.m)]
        for i in range(merged.m):
            for j in range(i + 1, merged.m):
                self.assertFalse(should_merge(stats[i], stats[j], 1e-9))

    def test_coincident_centres_merge(self):
        first = cluster_stats(np.array([[1.0, 1.0]]))
        second = cluster_stats(np.array([[1.0, 1.0], [1.0, 1.0]]))
        self.assertTrue(should_merge(first, second, 0.0))

    def test_refresh_ignores_label_numbering(self):
        p = Population.from_opinions(np.concatenate([
            self.rng.normal(c, 0.5, (40, 2)) for c in ((-3, 0), (3, 0), (0, 3))
        ]))
        a = initial_clustering(p, 6)
        permuted = ClusterAssignment((a.labels + 2) % a.m)
        self.assertEqual(refresh(a, p, 0.55, 1e-9).partition(), refresh(permuted, p, 0.55, 1e-9).partition())

    def test_masses_survive_split_and_merge_chains(self):
        p = Population.from_opinions(np.concatenate([
            self.rng.normal(c, 0.5, (50, 2)) for c in ((-3, 0), (3, 0), (0, 3), (0, -3))
        ]))
        a = initial_clustering(p, 2)
        for step in range(8):
            a = split_clusters(a, p, 0.55) if step % 2 == 0 else merge_clusters(a, p, 1e-9)
            self.assertEqual(int(a.sizes.sum()), 200)
            if a.m >= 2:
                self.assertEqual(float(reduce(a, p, KernelConfig()).masses.sum()), 200.0)
            p = p.with_opinions(p.opinions + 0.3 * self.rng.standard_normal(p.opinions.shape))

    def test_config_validation(self):
        with self.assertRaises(InvalidArgumentError):
            ClusteringConfig(split_threshold=0.0)
        with self.assertRaises(InvalidArgumentError):
            ClusteringConfig(m0=0)


class ReduceTests(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(3)
        x0 = rng.standard_normal((30, 2))
        self.p = Population(x0 + 0.1 * rng.standard_normal((30, 2)), x0)
        self.a = initial_clustering(self.p, 4)

    def test_quotient_state(self):
        rs = reduce(self.a, self.p, KernelConfig())
        self.assertEqual(rs.m, 4)
        self.assertEqual(rs.masses.sum(), 30)
        for c in range(4):
            rows = self.a.labels == c
            assert_allclose(rs.centers[c], self.p.opinions[rows].mean(axis=0))
            assert_allclose(rs.initial_centers[c], self.p.initial_opinions[rows].mean(axis=0))
        self.assertTrue(check_weight_matrix(rs.reduced_weights))

    def test_mass_weighted_graph(self):
        plain = reduce(self.a, self.p, KernelConfig())
        weighted = reduce(self.a, self.p, KernelConfig(), mass_weighted=True)
        self.assertTrue(check_weight_matrix(weighted.reduced_weights))
        if len(set(plain.masses.tolist())) > 1:
            self.assertFalse(np.allclose(plain.reduced_weights, weighted.reduced_weights))

    def test_single_cluster_cannot_reduce(self):
        with self.assertRaises(DegenerateReductionError):
            reduce(ClusterAssignment(np.zeros(30, dtype=int)), self.p, KernelConfig())

    def test_singleton_clusters_reproduce_the_full_graph(self):
        k = KernelConfig(sigma=0.7)
        rs = reduce(ClusterAssignment(np.arange(30)), self.p, k)
        assert_array_equal(rs.centers, self.p.opinions)
        assert_array_equal(rs.reduced_weights, build_weight_matrix(self.p, k))
