"""Dynamic opinion clusters and the quotient (reduced) state the game is solved on.

Clusters start from a Ward cut of the population, then each macro step
bimodal clusters are split in two and overlapping unimodal pairs are merged.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.cluster.hierarchy import DisjointSet, linkage
from scipy.stats import kurtosis, skew

from conflict.exceptions import DegenerateReductionError, InvalidArgumentError, UndefinedStatisticError
from conflict.graph_model import KernelConfig, Population, weight_matrix

MIN_SPLIT_SIZE = 4


@dataclass(frozen=True)
class ClusteringConfig:
    m0: int = 20
    split_threshold: float = 0.55
    merge_epsilon: float = 1e-9
    mass_weighted: bool = False

    def __post_init__(self):
        if self.m0 < 1:
            raise InvalidArgumentError(f'm0 must be >= 1, got {self.m0}')
        if not (0.0 < self.split_threshold <= 1.0):
            raise InvalidArgumentError(f'split threshold must lie in (0, 1], got {self.split_threshold}')
        if self.merge_epsilon < 0:
            raise InvalidArgumentError(f'merge epsilon must be >= 0, got {self.merge_epsilon}')


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise InvalidArgumentError('labels must be a non-empty vector')
        if not np.issubdtype(labels.dtype, np.integer):
            raise InvalidArgumentError('labels must be integers')
        labels = labels.astype(np.int64)
        m = int(labels.max()) + 1
        if labels.min() < 0 or np.any(np.bincount(labels, minlength=m) == 0):
            raise InvalidArgumentError('labels must cover 0..m-1 with no empty cluster')
        object.__setattr__(self, 'labels', labels)

    @property
    def m(self) -> int:
        return int(self.labels.max()) + 1

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.m)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    def partition(self) -> List[frozenset]:
        """Clusters as sets of individuals, independent of label numbering."""
        return sorted((frozenset(self.members(c).tolist()) for c in range(self.m)), key=min)


@dataclass(frozen=True, eq=False)
class ClusterStats:
    mean: np.ndarray
    covariance: np.ndarray
    size: int
    principal_axis: np.ndarray
    skewness: float
    kurtosis: float


@dataclass(frozen=True, eq=False)
class ReducedState:
    centers: np.ndarray
    masses: np.ndarray
    reduced_weights: np.ndarray
    initial_centers: np.ndarray
    mass_weighted: bool = False

    @property
    def m(self) -> int:
        return int(self.centers.shape[0])

    @property
    def d(self) -> int:
        return int(self.centers.shape[1])


def compact_labels(labels: np.ndarray) -> np.ndarray:
    """Renumber labels 0..m-1 in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first, kind='stable'), kind='stable')
    return order[inverse.ravel()].astype(np.int64)


def ward_labels(points: np.ndarray, n_clusters: int) -> np.ndarray:
    """Ward agglomeration of ``points`` cut at exactly ``n_clusters`` groups."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n = points.shape[0]
    if not (1 <= n_clusters <= n):
        raise InvalidArgumentError(f'cannot cut {n} points into {n_clusters} clusters')
    if n_clusters == n:
        return np.arange(n, dtype=np.int64)
    tree = linkage(points, method='ward')
    groups = DisjointSet(range(n))
    # representative original point of every merged node of the tree
    representative = list(range(n)) + [0] * (n - 1)
    for step in range(n - n_clusters):
        a, b = int(tree[step, 0]), int(tree[step, 1])
        groups.merge(representative[a], representative[b])
        representative[n + step] = representative[a]
    roots = np.array([groups[i] for i in range(n)])
    return compact_labels(roots)


def bimodality_coefficient(samples: np.ndarray) -> float:
    """Sarle's coefficient (skew^2 + 1) / kurtosis with Pearson (non-excess) kurtosis."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < MIN_SPLIT_SIZE:
        raise UndefinedStatisticError(f'bimodality needs at least {MIN_SPLIT_SIZE} samples, got {x.size}')
    scale = max(1.0, float(np.abs(x).max()))
    if np.ptp(x) == 0.0 or np.var(x) <= (np.finfo(float).eps * scale) ** 2:
        raise UndefinedStatisticError('bimodality is undefined for zero-variance samples')
    g1 = float(skew(x))
    g2 = float(kurtosis(x, fisher=False))
    return (g1 ** 2 + 1.0) / g2


def principal_axis(points: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = points.shape[1]
    if points.shape[0] < 2:
        axis = np.zeros(d)
        axis[0] = 1.0
        return axis
    cov = np.cov(points, rowvar=False, bias=True).reshape(d, d)
    _, vecs = np.linalg.eigh(cov)
    axis = vecs[:, -1]
    # sign convention: first non-negligible component positive
    pivot = int(np.argmax(np.abs(axis) > 1e-12))
    if axis[pivot] < 0:
        axis = -axis
    return axis


def cluster_stats(points: np.ndarray) -> ClusterStats:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    size, d = points.shape
    mean = points.mean(axis=0)
    if size > 1:
        cov = np.cov(points, rowvar=False, bias=True).reshape(d, d)
    else:
        cov = np.zeros((d, d))
    axis = principal_axis(points)
    proj = (points - mean) @ axis
    if size >= MIN_SPLIT_SIZE and np.ptp(proj) > 0:
        g1 = float(skew(proj))
        g2 = float(kurtosis(proj, fisher=False))
    else:
        g1 = g2 = float('nan')
    return ClusterStats(mean=mean, covariance=cov, size=size, principal_axis=axis, skewness=g1, kurtosis=g2)


def initial_clustering(p: Population, m0: int, seed: int = 0) -> ClusterAssignment:
    """Ward hierarchical clustering cut at ``m0`` clusters.

    Ward agglomeration is deterministic, so ``seed`` only exists to keep the
    signature uniform with the other seeded builders.
    """
    if not (1 <= m0 <= p.n):
        raise InvalidArgumentError(f'm0 must lie in [1, {p.n}], got {m0}')
    return ClusterAssignment(ward_labels(p.opinions, m0))


def split_clusters(a: ClusterAssignment, p: Population, threshold: float) -> ClusterAssignment:
    """Split every cluster whose principal-axis bimodality exceeds ``threshold`` (one pass)."""
    if not (0.0 < threshold <= 1.0):
        raise InvalidArgumentError(f'split threshold must lie in (0, 1], got {threshold}')
    labels = a.labels.copy()
    next_label = a.m
    for cluster in range(a.m):
        idx = a.members(cluster)
        if idx.size < MIN_SPLIT_SIZE:
            continue
        points = p.opinions[idx]
        axis = principal_axis(points)
        try:
            bc = bimodality_coefficient((points - points.mean(axis=0)) @ axis)
        except UndefinedStatisticError:
            continue
        if bc <= threshold:
            continue
        halves = ward_labels(points, 2)
        labels[idx[halves == 1]] = next_label
        next_label += 1
    return ClusterAssignment(compact_labels(labels))


def should_merge(first: ClusterStats, second: ClusterStats, epsilon: float) -> bool:
    """Means within one standard deviation of each other along the joining direction."""
    diff = first.mean - second.mean
    dist2 = float(diff @ diff)
    if np.sqrt(dist2) <= epsilon:
        return True
    spread_first = float(diff @ first.covariance @ diff) / dist2
    spread_second = float(diff @ second.covariance @ diff) / dist2
    return dist2 < min(spread_first, spread_second)


def merge_clusters(a: ClusterAssignment, p: Population, epsilon: float) -> ClusterAssignment:
    """Greedy merge in ascending (i, j) order, repeated until a pass merges nothing."""
    if epsilon < 0:
        raise InvalidArgumentError(f'merge epsilon must be >= 0, got {epsilon}')
    labels = compact_labels(a.labels)
    m = int(labels.max()) + 1
    stats = [cluster_stats(p.opinions[labels == c]) for c in range(m)]
    merged_any = True
    while merged_any:
        merged_any = False
        i = 0
        while i < m:
            j = i + 1
            while j < m:
                if should_merge(stats[i], stats[j], epsilon):
                    labels[labels == j] = i
                    labels[labels > j] -= 1
                    m -= 1
                    del stats[j]
                    stats[i] = cluster_stats(p.opinions[labels == i])
                    merged_any = True
                    continue
                j += 1
            i += 1
    return ClusterAssignment(labels)


def group_means(values: np.ndarray, labels: np.ndarray, m: Optional[int] = None) -> np.ndarray:
    values = np.atleast_2d(np.asarray(values, dtype=float))
    m = int(labels.max()) + 1 if m is None else m
    sums = np.zeros((m, values.shape[1]))
    np.add.at(sums, labels, values)
    counts = np.bincount(labels, minlength=m).astype(float)
    return sums / counts[:, None]


def reduce(a: ClusterAssignment, p: Population, k: KernelConfig, mass_weighted: bool = False) -> ReducedState:
    """Quotient state: cluster centres treated as individuals of a smaller network."""
    if a.m < 2:
        raise DegenerateReductionError(f'a reduced state needs at least 2 clusters, got {a.m}')
    if a.labels.size != p.n:
        raise InvalidArgumentError(f'assignment covers {a.labels.size} individuals, population has {p.n}')
    centers = group_means(p.opinions, a.labels, a.m)
    initial_centers = group_means(p.initial_opinions, a.labels, a.m)
    masses = a.sizes.astype(float)
    weights = weight_matrix(centers, k, masses if mass_weighted else None)
    return ReducedState(
        centers=centers,
        masses=masses,
        reduced_weights=weights,
        initial_centers=initial_centers,
        mass_weighted=mass_weighted,
    )


def refresh(a: ClusterAssignment, p: Population, threshold: float, epsilon: float) -> ClusterAssignment:
    return merge_clusters(split_clusters(a, p, threshold), p, epsilon)
