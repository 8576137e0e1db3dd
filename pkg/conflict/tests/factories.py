"""Small, fast inputs shared by the test modules."""
import numpy as np

from conflict.clustering import ClusterAssignment, reduce
from conflict.config import load_config
from conflict.graph_model import KernelConfig, Population

SMALL = {
    'network.n': '30',
    'solver.horizon': '2',
    'solver.steps': '3',
    'solver.max_level': '1',
    'clustering.m0': '4',
}


def small_config(**overrides):
    values = dict(SMALL)
    values.update(overrides)
    return load_config(overrides=values)


def random_population(rng, n, d, scale=1.0):
    return Population.from_opinions(scale * rng.standard_normal((n, d)))


def random_reduced_state(rng, m, d, per_cluster=5, sigma=1.0):
    """Well separated clusters of ``per_cluster`` individuals each, drifted away from x_0."""
    centres = 1.5 * rng.standard_normal((m, d))
    x0 = np.repeat(centres, per_cluster, axis=0) + 0.2 * rng.standard_normal((m * per_cluster, d))
    x = x0 + 0.3 * rng.standard_normal(x0.shape)
    labels = np.repeat(np.arange(m), per_cluster)
    return reduce(ClusterAssignment(labels), Population(x, x0), KernelConfig(sigma=sigma))
