"""Experiment configuration: flat ``section.key=value`` files.

Files are read with python-dotenv's parser (comments and quoting behave the
same as in ``.env``), merged over ``DEFAULTS``, validated section by section
with the forms in ``conflict.forms`` and assembled into an ``ExperimentConfig``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np
from dotenv import dotenv_values

from conflict.clustering import ClusteringConfig
from conflict.exceptions import ConfigError, ConflictError
from conflict.forms import (
    ClusteringForm,
    DynamicsForm,
    KernelForm,
    NetworkForm,
    PlayerForm,
    RunForm,
    SolverForm,
)
from conflict.graph_model import (
    KernelConfig,
    MixtureComponent,
    Population,
    force_directed_embedding,
    generate_synthetic_population,
    load_edge_list,
)
from conflict.influence_dynamics import DynamicsParams, MessagePair
from conflict.stackelberg import PlayerCost, SolverConfig, cold_start_messages

logger = logging.getLogger(__name__)

SECTIONS = ('network', 'dynamics', 'kernel', 'adversary', 'defender', 'solver', 'clustering', 'run')

# Synthetic three-cluster network at desk scale (300 individuals, d = 2).
DEFAULTS: Dict[str, str] = {
    'network.kind': 'synthetic',
    'network.n': '300',
    'network.means': '-1.5,-0.5;1.5,-0.5;0,1.5',
    'network.spreads': '0.5,0.5,0.5',
    'network.fractions': '0.34,0.33,0.33',
    'network.path': '',
    'network.iterations': '50',
    'network.embedding_seed': '0',
    'dynamics.alpha': '0.3',
    'dynamics.kappa_a': '0.5',
    'dynamics.kappa_d': '0.5',
    'dynamics.stubbornness': '0.7',
    'dynamics.eta': '0.5',
    'dynamics.sigmoid_gain': '1.0',
    'dynamics.clamp_rate': 'true',
    'dynamics.exposure': 'seeded',
    'kernel.form': 'gaussian',
    'kernel.sigma': '1.0',
    'adversary.state_weight': '3,0',
    'adversary.input_weight': '20',
    'adversary.target': '-1,0',
    'adversary.initial_message': '',
    'defender.state_weight': '1',
    'defender.input_weight': '80',
    'defender.target': '',
    'defender.initial_message': '',
    'solver.horizon': '5',
    'solver.max_level': '10',
    'solver.fd_step': '1e-5',
    'solver.replan_interval': '1',
    'solver.steps': '30',
    'solver.reroll_each_level': 'true',
    'clustering.m0': '20',
    'clustering.split_threshold': '0.55',
    'clustering.merge_epsilon': '1e-9',
    'clustering.mass_weighted': 'false',
    'run.seeds': '0',
    'run.sigmas': '',
    'run.output_dir': '',
}


@dataclass(frozen=True)
class NetworkConfig:
    kind: str = 'synthetic'
    n: int = 300
    components: tuple = ()
    path: Optional[Path] = None
    iterations: int = 50
    embedding_seed: int = 0

    def build(self, seed: int) -> Population:
        """Initial population; the seed only matters for synthetic mixtures."""
        if self.kind == 'edge_list':
            graph = load_edge_list(self.path)
            logger.info('loaded %s: %d nodes, %d edges', self.path, graph.n_nodes, graph.n_edges)
            return force_directed_embedding(graph, self.iterations, self.embedding_seed)
        return generate_synthetic_population(self.n, self.components, seed)


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkConfig
    dynamics: DynamicsParams
    kernel: KernelConfig
    adversary: PlayerCost
    defender: PlayerCost
    solver: SolverConfig
    clustering: ClusteringConfig
    seeds: List[int] = field(default_factory=lambda: [0])
    sigmas: List[float] = field(default_factory=list)
    output_dir: Optional[Path] = None
    initial_messages: Dict[str, List[float]] = field(default_factory=dict)
    values: Dict[str, str] = field(default_factory=dict, compare=False)

    def with_sigma(self, sigma: float) -> 'ExperimentConfig':
        values = dict(self.values, **{'kernel.sigma': repr(float(sigma))})
        return replace(self, kernel=self.kernel.with_sigma(sigma), values=values)

    def with_overrides(self, **overrides: str) -> 'ExperimentConfig':
        """Re-validate with some dotted keys replaced (``with_overrides(**{'solver.steps': '5'})``)."""
        return build_config(dict(self.values, **overrides))

    def initial_message_pair(self, p: Population) -> Optional[MessagePair]:
        """Configured cold-start messages; None lets the solver pick its defaults."""
        if not self.initial_messages:
            return None
        default = cold_start_messages(p, self.adversary)
        return MessagePair(
            self.initial_messages.get('adversary', default.u_a),
            self.initial_messages.get('defender', default.u_d),
        )


def _weight(value: Sequence, d: int) -> np.ndarray:
    value = np.asarray(value, dtype=float)
    if value.ndim == 2:
        return value
    if value.size == 1:
        return float(value[0]) * np.eye(d)
    return np.diag(value)


def _section(values: Mapping[str, str], name: str) -> Dict[str, str]:
    prefix = f'{name}.'
    return {k: v for k, v in values.items() if k.startswith(prefix)}


def build_config(values: Mapping[str, str]) -> ExperimentConfig:
    """Validate a flat key/value mapping (defaults already merged) into an ExperimentConfig."""
    values = {k: ('' if v is None else str(v)) for k, v in values.items()}
    errors: Dict[str, str] = {}
    unknown = sorted(k for k in values if k not in DEFAULTS)
    for key in unknown:
        errors[key] = 'Unknown key.'

    forms = {
        'network': NetworkForm(_section(values, 'network')),
        'dynamics': DynamicsForm(_section(values, 'dynamics')),
        'kernel': KernelForm(_section(values, 'kernel')),
        'adversary': PlayerForm(_section(values, 'adversary'), section='adversary'),
        'defender': PlayerForm(_section(values, 'defender'), section='defender'),
        'solver': SolverForm(_section(values, 'solver')),
        'clustering': ClusteringForm(_section(values, 'clustering')),
        'run': RunForm(_section(values, 'run')),
    }
    for form in forms.values():
        if not form.is_valid():
            errors.update(form.dotted_errors())
    if errors:
        raise ConfigError(errors)

    net = forms['network'].cleaned_data
    d = len(net['means'][0]) if net['kind'] == 'synthetic' else 2
    components = ()
    if net['kind'] == 'synthetic':
        components = tuple(
            MixtureComponent(mean=tuple(mean), covariance=(spread ** 2) * np.eye(len(mean)), fraction=fraction)
            for mean, spread, fraction in zip(net['means'], net['spreads'], net['fractions'])
        )

    try:
        players = {}
        initial_messages = {}
        for name in ('adversary', 'defender'):
            data = forms[name].cleaned_data
            target = data.get('target')
            players[name] = PlayerCost(_weight(data['state_weight'], d), _weight(data['input_weight'], d),
                                       None if target is None else np.asarray(target))
            if data.get('initial_message') is not None:
                if len(data['initial_message']) != d:
                    raise ConfigError({f'{name}.initial_message': f'Must have {d} coordinates.'})
                initial_messages[name] = data['initial_message']
        dyn = forms['dynamics'].cleaned_data
        sol = forms['solver'].cleaned_data
        clu = forms['clustering'].cleaned_data
        run = forms['run'].cleaned_data
        cfg = ExperimentConfig(
            network=NetworkConfig(
                kind=net['kind'],
                n=net.get('n') or 0,
                components=components,
                path=Path(net['path']) if net.get('path') else None,
                iterations=net['iterations'],
                embedding_seed=net['embedding_seed'],
            ),
            dynamics=DynamicsParams(**dyn),
            kernel=KernelConfig(**forms['kernel'].cleaned_data),
            adversary=players['adversary'],
            defender=players['defender'],
            solver=SolverConfig(**sol),
            clustering=ClusteringConfig(**clu),
            seeds=run['seeds'],
            sigmas=run.get('sigmas') or [],
            output_dir=Path(run['output_dir']) if run.get('output_dir') else None,
            initial_messages=initial_messages,
            values=dict(values),
        )
    except ConfigError:
        raise
    except ConflictError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_config(path: Optional[Path | str] = None, overrides: Optional[Mapping[str, str]] = None) -> ExperimentConfig:
    """Defaults, then the file at ``path``, then ``overrides``."""
    values = dict(DEFAULTS)
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f'config file {path} does not exist')
        values.update(dotenv_values(path))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(values)


def dump_config(cfg: ExperimentConfig, path: Path | str) -> Path:
    """Write the resolved configuration back in the same flat format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ['# resolved experiment configuration']
    for section in SECTIONS:
        lines.append('')
        for key in sorted(k for k in cfg.values if k.startswith(f'{section}.')):
            lines.append(f'{key}={cfg.values[key]}')
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path
