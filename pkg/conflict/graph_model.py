"""Opinion-dependent interaction structure.

Covers the homophily kernel, the row-normalised weight matrix built from it,
synthetic populations drawn from Gaussian mixtures, SNAP-style edge lists and
the force-directed embedding that turns a real graph into initial opinions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd
from scipy.spatial.distance import cdist

from conflict.exceptions import (
    DegenerateRowError,
    EdgeListParseError,
    EmptyInputError,
    InvalidArgumentError,
)

KERNEL_FORMS = ('gaussian',)
# Kernel values are clamped here before normalisation so sigma -> 0 sweeps stay defined.
KERNEL_FLOOR = 1e-300
ROW_SUM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class KernelConfig:
    """Homophily kernel psi(x, y) = exp(-|x - y|^2 / (2 sigma^2))."""
    sigma: float = 1.0
    form: str = 'gaussian'

    def __post_init__(self):
        if self.form not in KERNEL_FORMS:
            raise InvalidArgumentError(f'unknown kernel form {self.form!r}; expected one of {KERNEL_FORMS}')
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidArgumentError(f'kernel sigma must be a positive finite number, got {self.sigma!r}')

    def with_sigma(self, sigma: float) -> 'KernelConfig':
        return replace(self, sigma=float(sigma))


@dataclass(frozen=True, eq=False)
class Population:
    """Current opinions x_t and initial opinions x_0, both n x d."""
    opinions: np.ndarray
    initial_opinions: np.ndarray

    def __post_init__(self):
        x = _as_matrix(self.opinions, 'opinions')
        x0 = _as_matrix(self.initial_opinions, 'initial_opinions')
        if x.shape != x0.shape:
            raise InvalidArgumentError(f'opinions {x.shape} and initial_opinions {x0.shape} differ in shape')
        if x.shape[0] < 2:
            raise InvalidArgumentError(f'a population needs at least 2 individuals, got {x.shape[0]}')
        object.__setattr__(self, 'opinions', x)
        object.__setattr__(self, 'initial_opinions', x0)

    @classmethod
    def from_opinions(cls, opinions: np.ndarray) -> 'Population':
        x = np.array(opinions, dtype=float)
        return cls(x, x.copy())

    @property
    def n(self) -> int:
        return int(self.opinions.shape[0])

    @property
    def d(self) -> int:
        return int(self.opinions.shape[1])

    def with_opinions(self, opinions: np.ndarray) -> 'Population':
        return Population(opinions, self.initial_opinions)

    def to_csv(self, path: Path | str) -> None:
        """Snapshot as ``id,x0_0..x0_{d-1},x_0..x_{d-1}``."""
        frame = pd.DataFrame({'id': np.arange(self.n)})
        for j in range(self.d):
            frame[f'x0_{j}'] = self.initial_opinions[:, j]
        for j in range(self.d):
            frame[f'x_{j}'] = self.opinions[:, j]
        frame.to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path: Path | str) -> 'Population':
        frame = pd.read_csv(path, float_precision='round_trip').sort_values('id', kind='mergesort')
        x0_cols = sorted((c for c in frame.columns if c.startswith('x0_')), key=lambda c: int(c[3:]))
        x_cols = sorted((c for c in frame.columns if c.startswith('x_')), key=lambda c: int(c[2:]))
        if not x0_cols or len(x0_cols) != len(x_cols):
            raise InvalidArgumentError(f'{path}: expected matching x0_* and x_* columns')
        return cls(frame[x_cols].to_numpy(dtype=float), frame[x0_cols].to_numpy(dtype=float))


@dataclass(frozen=True)
class MixtureComponent:
    mean: Sequence[float]
    covariance: Sequence[Sequence[float]] | np.ndarray
    fraction: float


@dataclass(frozen=True, eq=False)
class EdgeListGraph:
    """Undirected simple graph; node ``i`` internally is ``node_ids[i]`` in the file."""
    node_ids: List[int]
    edges: List[Tuple[int, int]] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.node_ids)
        if len(set(self.node_ids)) != n:
            raise InvalidArgumentError('node ids must be unique')
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise InvalidArgumentError(f'self-loop on node index {i}')
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidArgumentError(f'edge ({i}, {j}) references an unknown node index')
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InvalidArgumentError(f'duplicate edge {key}')
            seen.add(key)

    @property
    def n_nodes(self) -> int:
        return len(self.node_ids)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> 'EdgeListGraph':
        ids = sorted(int(v) for v in graph.nodes())
        index = {nid: i for i, nid in enumerate(ids)}
        edges = sorted({
            (min(index[u], index[v]), max(index[u], index[v]))
            for u, v in graph.edges()
            if u != v
        })
        return cls(ids, edges)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_nodes))
        graph.add_edges_from(self.edges)
        return graph


def _as_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise InvalidArgumentError(f'{name} must be an n x d matrix, got shape {arr.shape}')
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f'{name} contains non-finite values')
    return arr


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size < 1:
        raise InvalidArgumentError(f'{name} must have at least one coordinate')
    if not np.all(np.isfinite(arr)):
        raise InvalidArgumentError(f'{name} contains non-finite values')
    return arr


def kernel_eval(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray, k: KernelConfig) -> float:
    x = _as_vector(x, 'x')
    y = _as_vector(y, 'y')
    if x.shape != y.shape:
        raise InvalidArgumentError(f'opinion dimensions differ: {x.size} vs {y.size}')
    diff = x - y
    value = math.exp(-float(np.dot(diff, diff)) / (2.0 * k.sigma ** 2))
    return max(value, KERNEL_FLOOR)


def kernel_matrix(xs: np.ndarray, ys: np.ndarray, k: KernelConfig) -> np.ndarray:
    """Pairwise kernel values between the rows of ``xs`` and ``ys``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if xs.shape[1] != ys.shape[1]:
        raise InvalidArgumentError(f'opinion dimensions differ: {xs.shape[1]} vs {ys.shape[1]}')
    sq = cdist(xs, ys, metric='sqeuclidean')
    return np.maximum(np.exp(-sq / (2.0 * k.sigma ** 2)), KERNEL_FLOOR)


def weight_matrix(opinions: np.ndarray, k: KernelConfig, masses: Optional[np.ndarray] = None) -> np.ndarray:
    """Row-normalised kernel matrix with zero diagonal.

    With ``masses`` every column j is scaled by the mass of node j before
    normalisation (quotient graph where larger clusters attract more interaction).
    """
    opinions = np.atleast_2d(np.asarray(opinions, dtype=float))
    if opinions.shape[0] < 2:
        raise InvalidArgumentError(f'a weight matrix needs at least 2 nodes, got {opinions.shape[0]}')
    kern = kernel_matrix(opinions, opinions, k)
    if masses is not None:
        kern = kern * np.asarray(masses, dtype=float)[None, :]
    np.fill_diagonal(kern, 0.0)
    totals = kern.sum(axis=1)
    bad = np.flatnonzero(~np.isfinite(totals) | (totals <= 0.0))
    if bad.size:
        row = int(bad[0])
        raise DegenerateRowError(row, float(totals[row]))
    return kern / totals[:, None]


def build_weight_matrix(p: Population, k: KernelConfig) -> np.ndarray:
    return weight_matrix(p.opinions, k)


def check_weight_matrix(w: np.ndarray, tolerance: float = ROW_SUM_TOLERANCE) -> bool:
    w = np.asarray(w, dtype=float)
    return bool(
        w.ndim == 2
        and w.shape[0] == w.shape[1]
        and np.all(np.diag(w) == 0.0)
        and np.all((w >= 0.0) & (w <= 1.0))
        and np.all(np.abs(w.sum(axis=1) - 1.0) <= tolerance)
    )


def generate_synthetic_population(n: int, components: Iterable[MixtureComponent], seed: int) -> Population:
    """Draw ``n`` opinions from a Gaussian mixture; deterministic per seed."""
    comps = list(components)
    if not comps:
        raise EmptyInputError('a synthetic population needs at least one mixture component')
    if n < 2:
        raise InvalidArgumentError(f'a population needs at least 2 individuals, got {n}')
    means = [_as_vector(c.mean, 'component mean') for c in comps]
    d = means[0].size
    if any(m.size != d for m in means):
        raise InvalidArgumentError('mixture component means differ in dimension')
    fractions = np.array([float(c.fraction) for c in comps])
    if np.any(fractions < 0) or abs(fractions.sum() - 1.0) > 1e-9:
        raise InvalidArgumentError(f'mixture fractions must be non-negative and sum to 1, got {fractions.tolist()}')
    covariances = []
    for idx, c in enumerate(comps):
        cov = np.atleast_2d(np.asarray(c.covariance, dtype=float))
        if cov.shape != (d, d):
            raise InvalidArgumentError(f'component {idx}: covariance must be {d}x{d}, got {cov.shape}')
        if not np.allclose(cov, cov.T):
            raise InvalidArgumentError(f'component {idx}: covariance is not symmetric')
        eig = np.linalg.eigvalsh(cov)
        if eig.min() < -1e-10 * max(1.0, float(np.abs(eig).max())):
            raise InvalidArgumentError(f'component {idx}: covariance is not positive semi-definite')
        covariances.append(cov)

    rng = np.random.default_rng(seed)
    choice = rng.choice(len(comps), size=n, p=fractions / fractions.sum())
    opinions = np.empty((n, d))
    for idx in range(len(comps)):
        rows = choice == idx
        count = int(rows.sum())
        if count:
            opinions[rows] = rng.multivariate_normal(means[idx], covariances[idx], size=count, method='eigh')
    return Population.from_opinions(opinions)


def load_edge_list(path: Path | str) -> EdgeListGraph:
    """Parse a SNAP-style edge list; self-loops dropped, duplicate edges collapsed."""
    graph = nx.Graph()
    with open(path, 'r', encoding='utf-8') as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListParseError(lineno, line, 'expected two whitespace-separated ids')
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(lineno, line, 'ids must be integers') from None
            if u < 0 or v < 0:
                raise EdgeListParseError(lineno, line, 'ids must be non-negative')
            graph.add_node(u)
            graph.add_node(v)
            if u != v:
                graph.add_edge(u, v)
    if graph.number_of_nodes() == 0:
        raise EmptyInputError(f'{path}: edge list holds no nodes')
    return EdgeListGraph.from_networkx(graph)


def write_edge_list(g: EdgeListGraph, path: Path | str) -> None:
    """Write back in the same format; isolated nodes are kept as ``id id`` lines."""
    touched = set()
    lines = [f'# nodes: {g.n_nodes} edges: {g.n_edges}']
    for i, j in g.edges:
        lines.append(f'{g.node_ids[i]} {g.node_ids[j]}')
        touched.update((i, j))
    for i, nid in enumerate(g.node_ids):
        if i not in touched:
            lines.append(f'{nid} {nid}')
    Path(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')


def force_directed_embedding(g: EdgeListGraph, iterations: int = 50, seed: int = 0) -> Population:
    """Fruchterman-Reingold layout standardised to zero mean and unit per-axis std."""
    if iterations < 1:
        raise InvalidArgumentError(f'iterations must be >= 1, got {iterations}')
    if g.n_nodes < 2:
        raise InvalidArgumentError(f'embedding needs at least 2 nodes, got {g.n_nodes}')
    layout = nx.spring_layout(g.to_networkx(), dim=2, iterations=iterations, seed=seed)
    positions = np.array([layout[i] for i in range(g.n_nodes)], dtype=float)
    positions -= positions.mean(axis=0)
    scale = positions.std(axis=0)
    scale[scale == 0.0] = 1.0
    positions /= scale
    return Population.from_opinions(positions)
