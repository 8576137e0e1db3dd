"""Scenario orchestration: build the population, play the game, score the outcome.

A scenario is one (sigma, seed) pair of an ExperimentConfig. Its trace, metrics
and resolved config are written under ``sigma_<sigma>_seed_<seed>/``; a sweep
adds one consolidated ``sweep.csv`` sorted by (sigma, seed).
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from conflict.clustering import bimodality_coefficient, principal_axis
from conflict.config import ExperimentConfig, dump_config
from conflict.exceptions import (
    ConflictError,
    EmptyInputError,
    InvalidArgumentError,
    ScenarioError,
    UndefinedStatisticError,
)
from conflict.graph_model import Population
from conflict.stackelberg import PlayerCost, receding_horizon_run
from conflict.trace import Trace

logger = logging.getLogger(__name__)

METRICS_FILE = 'metrics.csv'
SWEEP_FILE = 'sweep.csv'
CONFIG_FILE = 'config.conf'
METRIC_COLUMNS = ('mean_dist_defender_goal', 'mean_dist_adversary_goal', 'final_bimodality')
SWEEP_COLUMNS = ['sigma', 'seed', *METRIC_COLUMNS, 'J_a', 'J_d', 'error']


@dataclass(frozen=True)
class MetricsRecord:
    sigma: float
    seed: int
    mean_dist_defender_goal: float
    mean_dist_adversary_goal: float
    final_bimodality: float
    J_a: float
    J_d: float
    initial_adversary_bimodality: float = math.nan
    final_adversary_bimodality: float = math.nan
    steps: int = 0
    error: str = ''

    @property
    def valid(self) -> bool:
        return not self.error

    def sweep_row(self) -> Dict[str, object]:
        row = asdict(self)
        return {key: row[key] for key in SWEEP_COLUMNS}

    def to_csv(self, path: Path | str) -> None:
        pd.DataFrame([asdict(self)]).to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path: Path | str) -> 'MetricsRecord':
        row = pd.read_csv(path, float_precision='round_trip', keep_default_na=False).iloc[0].to_dict()
        for key in ('sigma', *METRIC_COLUMNS, 'J_a', 'J_d', 'initial_adversary_bimodality',
                    'final_adversary_bimodality'):
            row[key] = math.nan if row[key] == '' else float(row[key])
        row['seed'] = int(row['seed'])
        row['steps'] = int(row['steps'])
        row['error'] = str(row['error'])
        return cls(**row)


def scenario_dirname(sigma: float, seed: int) -> str:
    return f'sigma_{sigma:g}_seed_{seed}'


def mean_distance_to_goal(p: Population, goal_mode: str = 'initial', point: Optional[Sequence[float]] = None,
                          dims: Optional[Sequence[int]] = None) -> float:
    """Average distance of current opinions to x_0 (``initial``) or to a fixed ``point``.

    ``dims`` restricts the point distance to a subset of opinion dimensions.
    """
    if goal_mode == 'initial':
        gap = p.opinions - p.initial_opinions
    elif goal_mode == 'point':
        if point is None:
            raise InvalidArgumentError('point mode needs a goal point')
        point = np.asarray(point, dtype=float).ravel()
        if point.size != p.d:
            raise InvalidArgumentError(f'goal point has dimension {point.size}, population has {p.d}')
        gap = p.opinions - point[None, :]
    else:
        raise InvalidArgumentError(f'unknown goal mode {goal_mode!r}')
    if dims is not None:
        gap = gap[:, list(dims)]
    return float(np.linalg.norm(gap, axis=1).mean())


def final_bimodality(p: Population) -> float:
    """Bimodality coefficient of the opinions projected on their first principal axis."""
    axis = principal_axis(p.opinions)
    return bimodality_coefficient((p.opinions - p.opinions.mean(axis=0)) @ axis)


def adversary_axis(cost: PlayerCost, initial: np.ndarray) -> np.ndarray:
    """Direction the adversary's cost pushes along.

    The dominant eigenvector of its state weight; when that is not unique
    (isotropic weights) the direction from the initial mean to its target.
    """
    eig, vecs = np.linalg.eigh(cost.state_weight)
    unique_top = eig.size == 1 or eig[-1] - eig[-2] > 1e-12 * max(1.0, abs(eig[-1]))
    if unique_top or cost.target is None:
        axis = vecs[:, -1]
    else:
        axis = cost.target - np.asarray(initial, dtype=float).mean(axis=0)
        norm = np.linalg.norm(axis)
        axis = vecs[:, -1] if norm == 0 else axis / norm
    return axis if axis[int(np.argmax(np.abs(axis)))] >= 0 else -axis


def _safe_bimodality(values: np.ndarray) -> float:
    try:
        return bimodality_coefficient(values)
    except UndefinedStatisticError:
        return math.nan


def compute_metrics(trace: Trace, cfg: ExperimentConfig, seed: int) -> MetricsRecord:
    final = trace.final_population
    dims = cfg.adversary.active_dims
    if cfg.adversary.target is None:
        adversary_distance = mean_distance_to_goal(final, 'initial', dims=dims)
    else:
        adversary_distance = mean_distance_to_goal(final, 'point', cfg.adversary.target, dims=dims)
    try:
        bimodality = final_bimodality(final)
    except UndefinedStatisticError as exc:
        logger.warning('seed %d: %s', seed, exc)
        bimodality = math.nan
    axis = adversary_axis(cfg.adversary, trace.initial_opinions)
    return MetricsRecord(
        sigma=cfg.kernel.sigma,
        seed=seed,
        mean_dist_defender_goal=mean_distance_to_goal(final, 'initial'),
        mean_dist_adversary_goal=adversary_distance,
        final_bimodality=bimodality,
        J_a=trace.J_a,
        J_d=trace.J_d,
        initial_adversary_bimodality=_safe_bimodality(trace.opinions[0] @ axis),
        final_adversary_bimodality=_safe_bimodality(final.opinions @ axis),
        steps=trace.steps,
        error=trace.error,
    )


def run_scenario(cfg: ExperimentConfig, seed: int, out: Optional[Path | str] = None) -> Tuple[Trace, MetricsRecord]:
    """Play one scenario; with ``out`` the trace, metrics and config land in its scenario directory."""
    sigma = cfg.kernel.sigma
    root = Path(out) if out is not None else cfg.output_dir
    try:
        population = cfg.network.build(seed)
        trace = receding_horizon_run(
            population, cfg.adversary, cfg.defender, cfg.solver, cfg.dynamics, cfg.kernel, cfg.clustering,
            cfg.initial_message_pair(population),
        )
        metrics = compute_metrics(trace, cfg, seed)
        if root is not None:
            target = root / scenario_dirname(sigma, seed)
            trace.write(target)
            metrics.to_csv(target / METRICS_FILE)
            dump_config(cfg, target / CONFIG_FILE)
    except ScenarioError:
        raise
    except (ConflictError, ArithmeticError, OSError, np.linalg.LinAlgError) as exc:
        raise ScenarioError(sigma, seed, exc) from exc
    logger.info('scenario sigma=%g seed=%d: defender %.4f adversary %.4f bimodality %.4f%s',
                sigma, seed, metrics.mean_dist_defender_goal, metrics.mean_dist_adversary_goal,
                metrics.final_bimodality, '' if metrics.valid else f' (invalid: {metrics.error})')
    return trace, metrics


def metrics_from_directory(directory: Path | str, cfg: ExperimentConfig, seed: int) -> MetricsRecord:
    """Recompute a scenario's metrics from its persisted trace."""
    return compute_metrics(Trace.read(directory), cfg, seed)


def _failed_row(sigma: float, seed: int, exc: BaseException) -> Dict[str, object]:
    row = {key: math.nan for key in SWEEP_COLUMNS}
    row.update(sigma=float(sigma), seed=int(seed), error=str(exc))
    return row


def _sweep_task(args: Tuple[ExperimentConfig, float, int, Optional[Path]]) -> Dict[str, object]:
    cfg, sigma, seed, out = args
    try:
        _, metrics = run_scenario(cfg.with_sigma(sigma), seed, out)
    except ScenarioError as exc:
        logger.error('%s', exc)
        return _failed_row(sigma, seed, exc)
    return metrics.sweep_row()


def sweep_homophily(cfg: ExperimentConfig, sigmas: Iterable[float], jobs: int = 1,
                    out: Optional[Path | str] = None) -> pd.DataFrame:
    """Run every (sigma, seed) scenario; rows come back sorted by (sigma, seed) whatever the job count."""
    sigmas = [float(s) for s in sigmas]
    if not sigmas:
        raise EmptyInputError('sweep needs at least one sigma')
    if any(not (math.isfinite(s) and s > 0) for s in sigmas):
        raise InvalidArgumentError(f'every sigma must be positive, got {sigmas}')
    if jobs < 1:
        raise InvalidArgumentError(f'jobs must be >= 1, got {jobs}')
    root = Path(out) if out is not None else cfg.output_dir
    tasks = [(cfg, sigma, seed, root) for sigma in sigmas for seed in cfg.seeds]
    logger.info('sweep: %d scenarios over sigma=%s, %d job(s)', len(tasks), sigmas, jobs)

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows: List[Dict[str, object]] = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(task) for task in tasks]

    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    table = table.sort_values(['sigma', 'seed'], kind='mergesort').reset_index(drop=True)
    table['error'] = table['error'].fillna('').astype(str)
    if root is not None:
        root.mkdir(parents=True, exist_ok=True)
        table.to_csv(root / SWEEP_FILE, index=False)
    return table


def read_sweep(path: Path | str) -> pd.DataFrame:
    table = pd.read_csv(path, float_precision='round_trip', keep_default_na=False,
                        na_values={c: ['', 'nan', 'NaN'] for c in SWEEP_COLUMNS if c != 'error'})
    missing = [c for c in SWEEP_COLUMNS if c not in table.columns]
    if missing:
        raise InvalidArgumentError(f'{path}: missing sweep columns {missing}')
    table['error'] = table['error'].astype(str)
    return table
