"""History of one receding-horizon run and its CSV persistence."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, List

import numpy as np
import pandas as pd

from conflict.exceptions import InvalidArgumentError
from conflict.graph_model import Population

if TYPE_CHECKING:
    from conflict.stackelberg import PlayerCost

OPINIONS_FILE = 'opinions.csv'
MESSAGES_FILE = 'messages.csv'
CLUSTERS_FILE = 'clusters.csv'
ASSIGNMENTS_FILE = 'assignments.csv'
SUMMARY_FILE = 'summary.csv'
POPULATION_FILE = 'population.csv'


@dataclass(eq=False)
class Trace:
    """Opinions x_0..x_T, the messages of every executed step and the clusters they were chosen on."""
    opinions: List[np.ndarray]
    initial_opinions: np.ndarray
    messages_a: List[np.ndarray] = field(default_factory=list)
    messages_d: List[np.ndarray] = field(default_factory=list)
    assignments: List[np.ndarray] = field(default_factory=list)
    J_a: float = 0.0
    J_d: float = 0.0
    horizon: int = 0
    level: int = 0
    valid: bool = True
    error: str = ''

    @classmethod
    def start(cls, p: Population, horizon: int = 0, level: int = 0) -> 'Trace':
        return cls(opinions=[p.opinions.copy()], initial_opinions=p.initial_opinions.copy(),
                   horizon=horizon, level=level)

    @property
    def steps(self) -> int:
        return len(self.messages_a)

    @property
    def d(self) -> int:
        return int(self.initial_opinions.shape[1])

    @property
    def initial_population(self) -> Population:
        return Population(self.opinions[0], self.initial_opinions)

    @property
    def final_population(self) -> Population:
        return Population(self.opinions[-1], self.initial_opinions)

    def record(self, opinions: np.ndarray, u_a: np.ndarray, u_d: np.ndarray, labels: np.ndarray,
               cost_a: 'PlayerCost', cost_d: 'PlayerCost') -> None:
        """Append one executed macro-step and charge both players for it."""
        self.opinions.append(np.array(opinions, dtype=float))
        self.messages_a.append(np.array(u_a, dtype=float))
        self.messages_d.append(np.array(u_d, dtype=float))
        self.assignments.append(np.array(labels, dtype=np.int64))
        self.J_a += cost_a.state_cost(opinions, self.initial_opinions) + cost_a.input_cost(u_a)
        self.J_d += cost_d.state_cost(opinions, self.initial_opinions) + cost_d.input_cost(u_d)

    def abort(self, message: str) -> None:
        self.valid = False
        self.error = message

    def trajectory(self) -> np.ndarray:
        """(T + 1) x n x d array of opinions."""
        return np.stack(self.opinions)

    def write(self, directory: Path | str) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        d = self.d
        self.initial_population.to_csv(out / POPULATION_FILE)

        traj = self.trajectory()
        steps, n = traj.shape[0], traj.shape[1]
        frame = pd.DataFrame({
            't': np.repeat(np.arange(steps), n),
            'id': np.tile(np.arange(n), steps),
        })
        for j in range(d):
            frame[f'x_{j}'] = traj[:, :, j].ravel()
        frame.to_csv(out / OPINIONS_FILE, index=False)

        rows = []
        for t in range(self.steps):
            rows.append([t, 'adversary', *self.messages_a[t]])
            rows.append([t, 'defender', *self.messages_d[t]])
        pd.DataFrame(rows, columns=['t', 'player', *[f'u_{j}' for j in range(d)]]).to_csv(
            out / MESSAGES_FILE, index=False)

        cluster_rows, label_rows = [], []
        for t, labels in enumerate(self.assignments):
            sizes = np.bincount(labels)
            for c, size in enumerate(sizes):
                centre = self.opinions[t][labels == c].mean(axis=0)
                cluster_rows.append([t, c, int(size), *centre])
            label_rows.append(pd.DataFrame({'t': t, 'id': np.arange(labels.size), 'cluster_id': labels}))
        pd.DataFrame(cluster_rows, columns=['t', 'cluster_id', 'size', *[f'mean_{j}' for j in range(d)]]).to_csv(
            out / CLUSTERS_FILE, index=False)
        if label_rows:
            pd.concat(label_rows, ignore_index=True).to_csv(out / ASSIGNMENTS_FILE, index=False)
        else:
            pd.DataFrame(columns=['t', 'id', 'cluster_id']).to_csv(out / ASSIGNMENTS_FILE, index=False)

        pd.DataFrame([{
            'J_a': self.J_a, 'J_d': self.J_d, 'T': self.steps, 'H': self.horizon, 'level': self.level,
            'valid': self.valid, 'error': self.error,
        }]).to_csv(out / SUMMARY_FILE, index=False)
        return out

    @classmethod
    def read(cls, directory: Path | str) -> 'Trace':
        src = Path(directory)
        if not (src / SUMMARY_FILE).exists():
            raise InvalidArgumentError(f'{src}: no {SUMMARY_FILE}, not a trace directory')
        population = Population.from_csv(src / POPULATION_FILE)
        d = population.d

        frame = pd.read_csv(src / OPINIONS_FILE, float_precision='round_trip')
        frame = frame.sort_values(['t', 'id'], kind='mergesort')
        cols = [f'x_{j}' for j in range(d)]
        opinions = [group[cols].to_numpy(dtype=float) for _, group in frame.groupby('t', sort=True)]

        messages = pd.read_csv(src / MESSAGES_FILE, float_precision='round_trip').sort_values('t', kind='mergesort')
        ucols = [f'u_{j}' for j in range(d)]
        messages_a = [row for row in messages[messages['player'] == 'adversary'][ucols].to_numpy(dtype=float)]
        messages_d = [row for row in messages[messages['player'] == 'defender'][ucols].to_numpy(dtype=float)]

        labels = pd.read_csv(src / ASSIGNMENTS_FILE).sort_values(['t', 'id'], kind='mergesort')
        assignments = [group['cluster_id'].to_numpy(dtype=np.int64) for _, group in labels.groupby('t', sort=True)]

        summary = pd.read_csv(src / SUMMARY_FILE, float_precision='round_trip', keep_default_na=False).iloc[0]
        valid = summary['valid']
        if isinstance(valid, str):
            valid = valid.strip().lower() == 'true'
        return cls(
            opinions=opinions,
            initial_opinions=population.initial_opinions,
            messages_a=messages_a,
            messages_d=messages_d,
            assignments=assignments,
            J_a=float(summary['J_a']),
            J_d=float(summary['J_d']),
            horizon=int(summary['H']),
            level=int(summary['level']),
            valid=bool(valid),
            error=str(summary['error']),
        )
