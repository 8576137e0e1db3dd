"""Static PNG figures for traces, sweeps and sample networks (Agg backend, no display)."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Sequence, Union

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from conflict.exceptions import EmptyInputError, InvalidArgumentError  # noqa: E402
from conflict.graph_model import KernelConfig, MixtureComponent, generate_synthetic_population, weight_matrix  # noqa: E402
from conflict.trace import Trace  # noqa: E402

logger = logging.getLogger(__name__)

METRIC_LABELS = {
    'mean_dist_defender_goal': "Mean distance to defender's goal",
    'mean_dist_adversary_goal': "Mean distance to adversary's goal",
    'final_bimodality': 'Bimodality coefficient of x_T',
}


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_trace(trace: Trace, out: Path | str) -> List[Path]:
    """Initial-vs-final scatter plus one trajectory panel per opinion dimension."""
    out = Path(out)
    traj = trace.trajectory()
    start, final = traj[0], traj[-1]
    written = []

    fig, ax = plt.subplots(figsize=(6, 6))
    if trace.d >= 2:
        ax.scatter(start[:, 0], start[:, 1], s=8, c='tab:gray', alpha=0.5, label='initial')
        ax.scatter(final[:, 0], final[:, 1], s=8, c='tab:blue', alpha=0.7, label='final')
        ax.set_xlabel('dimension 0')
        ax.set_ylabel('dimension 1')
    else:
        ax.scatter(start[:, 0], final[:, 0], s=8, c='tab:blue', alpha=0.7)
        ax.set_xlabel('initial opinion')
        ax.set_ylabel('final opinion')
    ax.set_title(f'Opinions after {trace.steps} steps' + ('' if trace.valid else ' (aborted)'))
    if trace.d >= 2:
        ax.legend(loc='best')
    written.append(_save(fig, out / 'opinions_scatter.png'))

    steps = np.arange(traj.shape[0])
    for j in range(trace.d):
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(steps, traj[:, :, j], color='tab:blue', alpha=0.15, linewidth=0.6)
        ax.plot(steps, traj[:, :, j].mean(axis=1), color='red', linestyle='--', linewidth=1.5, label='population mean')
        ax.set_xlabel('macro-time step')
        ax.set_ylabel(f'opinion dimension {j}')
        ax.legend(loc='best')
        written.append(_save(fig, out / f'trajectory_dim_{j}.png'))
    return written


def plot_sweep(table: pd.DataFrame, out: Path | str) -> List[Path]:
    """One metric-vs-sigma figure per metric: per-seed points and the median curve."""
    out = Path(out)
    ok = table[table['error'].fillna('').astype(str) == ''] if 'error' in table else table
    written = []
    for metric, label in METRIC_LABELS.items():
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.scatter(ok['sigma'], ok[metric], s=14, alpha=0.6, label='seeds')
        medians = ok.groupby('sigma', sort=True)[metric].median()
        ax.plot(medians.index, medians.values, marker='o', color='black', label='median')
        if (ok['sigma'] > 0).all() and ok['sigma'].nunique() > 1:
            ax.set_xscale('log')
        ax.set_xlabel('homophily coefficient sigma')
        ax.set_ylabel(label)
        ax.legend(loc='best')
        written.append(_save(fig, out / f'sweep_{metric}.png'))
    return written


def plot_network_samples(sigmas: Sequence[float], out: Path | str, components: Sequence[MixtureComponent],
                         n: int = 40, seed: int = 0) -> Path:
    """Small sample network drawn once per sigma; edge opacity follows the interaction weight."""
    sigmas = list(sigmas)
    if not sigmas:
        raise EmptyInputError('network samples need at least one sigma')
    population = generate_synthetic_population(n, components, seed)
    points = population.opinions[:, :2] if population.d >= 2 else np.column_stack([population.opinions[:, 0], np.zeros(n)])
    fig, axes = plt.subplots(1, len(sigmas), figsize=(3.2 * len(sigmas), 3.4), squeeze=False)
    for ax, sigma in zip(axes[0], sigmas):
        w = weight_matrix(population.opinions, KernelConfig(sigma=sigma))
        sym = np.triu(w + w.T, k=1)
        i, j = np.nonzero(sym)
        strength = sym[i, j] / sym.max()
        colors = np.zeros((i.size, 4))
        colors[:, 3] = np.clip(strength, 0.0, 1.0)
        ax.add_collection(LineCollection(np.stack([points[i], points[j]], axis=1), colors=colors, linewidths=0.6))
        ax.scatter(points[:, 0], points[:, 1], s=10, c='tab:orange', zorder=3)
        ax.set_title(f'sigma = {sigma:g}')
        ax.set_xticks([])
        ax.set_yticks([])
        ax.autoscale()
    return _save(fig, Path(out) / 'network_samples.png')


def emit_plots(source: Union[Trace, pd.DataFrame], out: Path | str) -> List[Path]:
    """Trace panels for a scenario, metric curves for a sweep table."""
    if isinstance(source, Trace):
        if source.steps == 0:
            raise EmptyInputError('trace holds no executed steps')
        written = plot_trace(source, out)
    elif isinstance(source, pd.DataFrame):
        if source.empty:
            raise EmptyInputError('sweep table is empty')
        written = plot_sweep(source, out)
    else:
        raise InvalidArgumentError(f'nothing to plot in {type(source).__name__}')
    logger.info('wrote %d figure(s) to %s', len(written), out)
    return written
