"""Bounded-cognition Stackelberg solver on the reduced state, and the receding-horizon loop.

Each macro step the cluster centres are rolled forward under the previous
messages, the reduced map is linearised around that reference, and the two
players alternate affine LQR best responses for ``max_level`` cognition
levels (defender first at every level, adversary answering the fresh
defender). The defender re-solves once more against the final adversary,
both policies are applied for ``replan_interval`` steps on the full network,
and the loop starts again from the observed state.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from conflict.clustering import (
    ClusteringConfig,
    ReducedState,
    group_means,
    initial_clustering,
    reduce,
    refresh,
)
from conflict.exceptions import (
    ConflictError,
    InvalidArgumentError,
    NumericError,
    SolverDivergenceError,
    UndefinedStatisticError,
)
from conflict.graph_model import KernelConfig, Population
from conflict.influence_dynamics import DynamicsParams, MessagePair, opinion_map, opinion_step
from conflict.trace import Trace

logger = logging.getLogger(__name__)

ADVERSARY = 'adversary'
DEFENDER = 'defender'
PLAYERS = (ADVERSARY, DEFENDER)
PSD_FLOOR = -1e-8


@dataclass(frozen=True)
class SolverConfig:
    horizon: int = 5
    max_level: int = 10
    fd_step: float = 1e-5
    replan_interval: int = 1
    steps: int = 30
    reroll_each_level: bool = True

    def __post_init__(self):
        if self.max_level < 1:
            raise InvalidArgumentError(f'max_level must be >= 1, got {self.max_level}')
        if not (1 <= self.replan_interval <= self.horizon <= self.steps):
            raise InvalidArgumentError(
                f'need 1 <= replan_interval <= horizon <= steps, got '
                f'{self.replan_interval}, {self.horizon}, {self.steps}'
            )
        if not self.fd_step > 0:
            raise InvalidArgumentError(f'fd_step must be positive, got {self.fd_step}')


def _check_psd(matrix: np.ndarray, name: str, strict: bool = False) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise InvalidArgumentError(f'{name} must be square, got shape {matrix.shape}')
    if not np.allclose(matrix, matrix.T, atol=1e-10):
        raise InvalidArgumentError(f'{name} must be symmetric')
    eig = np.linalg.eigvalsh(matrix)
    scale = max(1.0, float(np.abs(eig).max()))
    if strict and eig.min() <= 0:
        raise InvalidArgumentError(f'{name} must be positive definite')
    if eig.min() < -1e-10 * scale:
        raise InvalidArgumentError(f'{name} must be positive semi-definite')


@dataclass(frozen=True, eq=False)
class CostSpec:
    """Quadratic cost on the stacked reduced state: (s - goal)^T Q (s - goal) + u^T R u."""
    Q: np.ndarray
    R: np.ndarray
    goal: np.ndarray

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        r = np.atleast_2d(np.asarray(self.R, dtype=float))
        goal = np.asarray(self.goal, dtype=float)
        _check_psd(q, 'Q')
        _check_psd(r, 'R', strict=True)
        if goal.shape[-1] != q.shape[0] or goal.ndim not in (1, 2):
            raise InvalidArgumentError(f'goal shape {goal.shape} does not match Q of size {q.shape[0]}')
        object.__setattr__(self, 'Q', q)
        object.__setattr__(self, 'R', r)
        object.__setattr__(self, 'goal', goal)

    def goal_at(self, tau: int) -> np.ndarray:
        return self.goal if self.goal.ndim == 1 else self.goal[tau]


@dataclass(frozen=True, eq=False)
class PlayerCost:
    """Per-individual cost of one player.

    ``target`` None means the status quo: every individual's own x_0.
    """
    state_weight: np.ndarray
    input_weight: np.ndarray
    target: Optional[np.ndarray] = None

    def __post_init__(self):
        q = np.atleast_2d(np.asarray(self.state_weight, dtype=float))
        r = np.atleast_2d(np.asarray(self.input_weight, dtype=float))
        _check_psd(q, 'state weight')
        _check_psd(r, 'input weight', strict=True)
        if q.shape != r.shape:
            raise InvalidArgumentError(f'state weight {q.shape} and input weight {r.shape} differ in dimension')
        object.__setattr__(self, 'state_weight', q)
        object.__setattr__(self, 'input_weight', r)
        if self.target is not None:
            target = np.asarray(self.target, dtype=float).ravel()
            if target.size != q.shape[0]:
                raise InvalidArgumentError(f'target has dimension {target.size}, weights have {q.shape[0]}')
            object.__setattr__(self, 'target', target)

    @property
    def d(self) -> int:
        return int(self.state_weight.shape[0])

    @property
    def active_dims(self) -> np.ndarray:
        """Opinion dimensions the state weight acts on."""
        return np.flatnonzero(np.abs(np.diag(self.state_weight)) > 0)

    def goals(self, initial: np.ndarray) -> np.ndarray:
        initial = np.asarray(initial, dtype=float)
        if self.target is None:
            return initial
        return np.broadcast_to(self.target, initial.shape)

    def for_reduced(self, rs: ReducedState) -> CostSpec:
        """Cluster costs scaled by cluster mass so the reduced objective sums over individuals."""
        q = np.kron(np.diag(rs.masses), self.state_weight)
        return CostSpec(q, self.input_weight, self.goals(rs.initial_centers).ravel())

    def state_cost(self, opinions: np.ndarray, initial: np.ndarray) -> float:
        dev = np.asarray(opinions, dtype=float) - self.goals(initial)
        return float(np.einsum('ij,jk,ik->', dev, self.state_weight, dev))

    def input_cost(self, u: np.ndarray) -> float:
        u = np.asarray(u, dtype=float)
        return float(u @ self.input_weight @ u)


@dataclass(frozen=True, eq=False)
class ReducedMap:
    """F restricted to cluster centres, on the flattened state s (m * d)."""
    initial_centers: np.ndarray
    masses: np.ndarray
    dynamics: DynamicsParams
    kernel: KernelConfig
    mass_weighted: bool = False

    @classmethod
    def from_state(cls, rs: ReducedState, dp: DynamicsParams, k: KernelConfig) -> 'ReducedMap':
        return cls(rs.initial_centers.copy(), rs.masses.copy(), dp, k, rs.mass_weighted)

    @property
    def m(self) -> int:
        return int(self.initial_centers.shape[0])

    @property
    def d(self) -> int:
        return int(self.initial_centers.shape[1])

    @property
    def state_dim(self) -> int:
        return self.m * self.d

    def __call__(self, state: np.ndarray, u_a: np.ndarray, u_d: np.ndarray) -> np.ndarray:
        centers = np.asarray(state, dtype=float).reshape(self.m, self.d)
        nxt = opinion_map(
            centers, self.initial_centers, MessagePair(u_a, u_d), self.dynamics, self.kernel,
            self.masses if self.mass_weighted else None,
        )
        return nxt.ravel()


@dataclass(frozen=True, eq=False)
class FeedbackPolicy:
    """u_tau = K_tau (s_tau - reference_tau) + k_tau, absolute messages."""
    gains: np.ndarray
    offsets: np.ndarray
    reference: np.ndarray
    player: str
    level: int = 0

    def __post_init__(self):
        if self.player not in PLAYERS:
            raise InvalidArgumentError(f'unknown player {self.player!r}')
        horizon = self.gains.shape[0]
        if self.offsets.shape[0] != horizon or self.reference.shape[0] != horizon + 1:
            raise InvalidArgumentError('gains, offsets and reference disagree on the horizon')

    @classmethod
    def constant(cls, u: np.ndarray, horizon: int, state_dim: int, player: str, level: int = 0) -> 'FeedbackPolicy':
        u = np.asarray(u, dtype=float).ravel()
        return cls(
            gains=np.zeros((horizon, u.size, state_dim)),
            offsets=np.tile(u, (horizon, 1)),
            reference=np.zeros((horizon + 1, state_dim)),
            player=player,
            level=level,
        )

    @property
    def horizon(self) -> int:
        return int(self.gains.shape[0])

    def act(self, tau: int, state: np.ndarray) -> np.ndarray:
        return self.gains[tau] @ (np.asarray(state, dtype=float) - self.reference[tau]) + self.offsets[tau]

    def rebase(self, reference: np.ndarray) -> 'FeedbackPolicy':
        """Same feedback law expressed as deviations from another reference."""
        reference = np.asarray(reference, dtype=float)
        if reference.shape != self.reference.shape:
            raise InvalidArgumentError(f'reference shape {reference.shape} != {self.reference.shape}')
        shift = np.einsum('tij,tj->ti', self.gains, reference[:-1] - self.reference[:-1])
        return FeedbackPolicy(self.gains, self.offsets + shift, reference.copy(), self.player, self.level)

    def with_gains(self, gains: np.ndarray) -> 'FeedbackPolicy':
        return FeedbackPolicy(np.asarray(gains, dtype=float), self.offsets, self.reference, self.player, self.level)


@dataclass(frozen=True, eq=False)
class ReferenceTrajectory:
    states: np.ndarray
    inputs_a: np.ndarray
    inputs_d: np.ndarray
    dynamics: ReducedMap

    @property
    def horizon(self) -> int:
        return int(self.inputs_a.shape[0])


@dataclass(frozen=True, eq=False)
class LinearizedDynamics:
    """s_bar' = A s_bar + B_a du_a + B_d du_d + c around ``states`` / ``inputs_*``."""
    A: np.ndarray
    B_a: np.ndarray
    B_d: np.ndarray
    c: np.ndarray
    states: np.ndarray
    inputs_a: np.ndarray
    inputs_d: np.ndarray

    def __post_init__(self):
        horizon, n, _ = self.A.shape
        if (self.B_a.shape[:2] != (horizon, n) or self.B_d.shape[:2] != (horizon, n)
                or self.c.shape != (horizon, n) or self.states.shape != (horizon + 1, n)
                or self.inputs_a.shape != (horizon, self.B_a.shape[2])
                or self.inputs_d.shape != (horizon, self.B_d.shape[2])):
            raise InvalidArgumentError('linearized dynamics have inconsistent shapes')
        for name in ('A', 'B_a', 'B_d', 'c'):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NumericError(f'linearized dynamics: {name} has non-finite entries', coordinate=name)

    @property
    def horizon(self) -> int:
        return int(self.A.shape[0])

    @property
    def state_dim(self) -> int:
        return int(self.A.shape[1])

    def inputs(self, player: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(B_own, B_opp, reference inputs own, reference inputs opponent)."""
        if player == DEFENDER:
            return self.B_d, self.B_a, self.inputs_d, self.inputs_a
        if player == ADVERSARY:
            return self.B_a, self.B_d, self.inputs_a, self.inputs_d
        raise InvalidArgumentError(f'unknown player {player!r}')


@dataclass(frozen=True)
class LevelRecord:
    level: int
    defender_before: float
    defender_after: float
    adversary_objective: float


@dataclass(frozen=True, eq=False)
class StackelbergSolution:
    adversary: FeedbackPolicy
    defender: FeedbackPolicy
    linearization: LinearizedDynamics
    levels: List[LevelRecord] = field(default_factory=list)

    def __iter__(self) -> Iterator[FeedbackPolicy]:
        return iter((self.adversary, self.defender))


def rollout_closed_loop(dynamics: ReducedMap, start: np.ndarray, adversary: FeedbackPolicy,
                        defender: FeedbackPolicy, level: int = 0) -> ReferenceTrajectory:
    horizon = adversary.horizon
    states = np.empty((horizon + 1, dynamics.state_dim))
    states[0] = start
    inputs_a = np.empty((horizon, dynamics.d))
    inputs_d = np.empty((horizon, dynamics.d))
    for tau in range(horizon):
        inputs_a[tau] = adversary.act(tau, states[tau])
        inputs_d[tau] = defender.act(tau, states[tau])
        if not (np.all(np.isfinite(inputs_a[tau])) and np.all(np.isfinite(inputs_d[tau]))):
            raise SolverDivergenceError(level, f'non-finite message at step {tau}')
        try:
            states[tau + 1] = dynamics(states[tau], inputs_a[tau], inputs_d[tau])
        except ConflictError as exc:
            raise SolverDivergenceError(level, str(exc)) from exc
        if not np.all(np.isfinite(states[tau + 1])):
            raise SolverDivergenceError(level, f'non-finite cluster centres at step {tau + 1}')
    return ReferenceTrajectory(states, inputs_a, inputs_d, dynamics)


def rollout_reference(rs: ReducedState, u_a_prev: np.ndarray, u_d_prev: np.ndarray, cfg: SolverConfig,
                      dp: DynamicsParams, k: KernelConfig) -> ReferenceTrajectory:
    """Level-0 reference: both players repeat their previous message over the horizon."""
    dynamics = ReducedMap.from_state(rs, dp, k)
    n = dynamics.state_dim
    adversary = FeedbackPolicy.constant(u_a_prev, cfg.horizon, n, ADVERSARY)
    defender = FeedbackPolicy.constant(u_d_prev, cfg.horizon, n, DEFENDER)
    return rollout_closed_loop(dynamics, rs.centers.ravel(), adversary, defender, level=0)


def _coordinate_names(m: int, d: int) -> List[str]:
    names = [f'state[{i},{j}]' for i in range(m) for j in range(d)]
    names += [f'u_a[{j}]' for j in range(d)]
    names += [f'u_d[{j}]' for j in range(d)]
    return names


def central_jacobian(func: Callable[[np.ndarray], np.ndarray], z: np.ndarray, rel_step: float,
                     names: Optional[Sequence[str]] = None) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    columns = []
    for j in range(z.size):
        name = names[j] if names else f'z[{j}]'
        h = rel_step * max(1.0, abs(z[j]))
        plus = z.copy()
        minus = z.copy()
        plus[j] += h
        minus[j] -= h
        try:
            col = (func(plus) - func(minus)) / (plus[j] - minus[j])
        except ConflictError as exc:
            raise NumericError(f'map evaluation failed while differentiating {name}: {exc}', coordinate=name) from exc
        if not np.all(np.isfinite(col)):
            raise NumericError(f'non-finite Jacobian entry for {name}', coordinate=name)
        columns.append(col)
    return np.column_stack(columns)


def linearize(traj: ReferenceTrajectory, cfg: SolverConfig, dp: Optional[DynamicsParams] = None,
              k: Optional[KernelConfig] = None) -> LinearizedDynamics:
    """Central finite-difference Jacobians of the reduced map along the reference.

    ``dp`` and ``k`` default to the parameters the trajectory was rolled out with.
    """
    dyn = traj.dynamics
    if dp is not None or k is not None:
        dyn = replace(dyn, dynamics=dp or dyn.dynamics, kernel=k or dyn.kernel)
    n, d, horizon = dyn.state_dim, dyn.d, traj.horizon
    names = _coordinate_names(dyn.m, d)
    A = np.empty((horizon, n, n))
    B_a = np.empty((horizon, n, d))
    B_d = np.empty((horizon, n, d))
    c = np.empty((horizon, n))

    def stacked(z: np.ndarray) -> np.ndarray:
        return dyn(z[:n], z[n:n + d], z[n + d:])

    for tau in range(horizon):
        z = np.concatenate([traj.states[tau], traj.inputs_a[tau], traj.inputs_d[tau]])
        step_names = [f'{name} at step {tau}' for name in names]
        jac = central_jacobian(stacked, z, cfg.fd_step, step_names)
        A[tau] = jac[:, :n]
        B_a[tau] = jac[:, n:n + d]
        B_d[tau] = jac[:, n + d:]
        c[tau] = stacked(z) - traj.states[tau + 1]
    return LinearizedDynamics(A, B_a, B_d, c, traj.states.copy(), traj.inputs_a.copy(), traj.inputs_d.copy())


def _stage_cost_matrix(cost: CostSpec, reference_state: np.ndarray, tau: int) -> np.ndarray:
    """Quadratic form of (s - goal)^T Q (s - goal) in the augmented state [s_bar; 1]."""
    n = reference_state.size
    offset = reference_state - cost.goal_at(tau)
    q_off = cost.Q @ offset
    out = np.empty((n + 1, n + 1))
    out[:n, :n] = cost.Q
    out[:n, n] = q_off
    out[n, :n] = q_off
    out[n, n] = offset @ q_off
    return out


def lqr_best_response(lin: LinearizedDynamics, opponent: FeedbackPolicy, cost: CostSpec, player: str,
                      level: Optional[int] = None) -> FeedbackPolicy:
    """Affine LQR best response of ``player`` to a frozen opponent feedback policy.

    The opponent's gains close the loop (A_hat = A + B_opp K_opp); goal offsets,
    reference inputs and the opponent's affine terms ride on a constant-1
    coordinate appended to the state.
    """
    if opponent.horizon != lin.horizon:
        raise InvalidArgumentError(f'opponent horizon {opponent.horizon} != {lin.horizon}')
    if cost.Q.shape[0] != lin.state_dim:
        raise InvalidArgumentError(f'cost Q has size {cost.Q.shape[0]}, state has {lin.state_dim}')
    b_own, b_opp, u_own, u_opp = lin.inputs(player)
    opponent = opponent.rebase(lin.states)
    horizon, n = lin.horizon, lin.state_dim
    d = b_own.shape[2]
    r = cost.R
    gains = np.empty((horizon, d, n))
    offsets = np.empty((horizon, d))

    value = _stage_cost_matrix(cost, lin.states[horizon], horizon)
    for tau in reversed(range(horizon)):
        a_hat = lin.A[tau] + b_opp[tau] @ opponent.gains[tau]
        drift = b_opp[tau] @ (opponent.offsets[tau] - u_opp[tau]) + lin.c[tau]
        a_aug = np.zeros((n + 1, n + 1))
        a_aug[:n, :n] = a_hat
        a_aug[:n, n] = drift
        a_aug[n, n] = 1.0
        b_aug = np.zeros((n + 1, d))
        b_aug[:n] = b_own[tau]

        stage = _stage_cost_matrix(cost, lin.states[tau], tau)
        r_ref = r @ u_own[tau]
        stage[n, n] += u_own[tau] @ r_ref
        cross = np.zeros((n + 1, d))
        cross[n] = r_ref

        s_mat = r + b_aug.T @ value @ b_aug
        l_mat = b_aug.T @ value @ a_aug + cross.T
        try:
            k_aug = -scipy.linalg.solve(s_mat, l_mat, assume_a='pos')
        except (scipy.linalg.LinAlgError, ValueError) as exc:
            raise NumericError(f'{player} Riccati step {tau}: S is singular ({exc})', coordinate=f'S[{tau}]') from exc
        value = stage + a_aug.T @ value @ a_aug + l_mat.T @ k_aug
        value = 0.5 * (value + value.T)
        eig = np.linalg.eigvalsh(value)
        if eig.min() < PSD_FLOOR * max(1.0, float(np.abs(eig).max())):
            raise NumericError(f'{player} value matrix at step {tau} is not PSD (min eigenvalue {eig.min():.3e})',
                               coordinate=f'P[{tau}]')
        gains[tau] = k_aug[:, :n]
        offsets[tau] = u_own[tau] + k_aug[:, n]

    if not (np.all(np.isfinite(gains)) and np.all(np.isfinite(offsets))):
        raise NumericError(f'{player} feedback policy has non-finite entries')
    return FeedbackPolicy(gains, offsets, lin.states.copy(), player,
                          opponent.level + 1 if level is None else level)


def linearized_objective(lin: LinearizedDynamics, policy: FeedbackPolicy, opponent: FeedbackPolicy,
                         cost: CostSpec, initial_deviation: Optional[np.ndarray] = None) -> float:
    """Quadratic objective of ``policy.player`` on the linear model, same stages as the Riccati solve."""
    b_own, b_opp, u_own, u_opp = lin.inputs(policy.player)
    policy = policy.rebase(lin.states)
    opponent = opponent.rebase(lin.states)
    deviation = np.zeros(lin.state_dim) if initial_deviation is None else np.asarray(initial_deviation, dtype=float)
    total = 0.0
    for tau in range(lin.horizon):
        state = lin.states[tau] + deviation
        own = policy.act(tau, state)
        opp = opponent.act(tau, state)
        gap = state - cost.goal_at(tau)
        total += float(gap @ cost.Q @ gap + own @ cost.R @ own)
        deviation = (lin.A[tau] @ deviation + b_own[tau] @ (own - u_own[tau])
                     + b_opp[tau] @ (opp - u_opp[tau]) + lin.c[tau])
    gap = lin.states[lin.horizon] + deviation - cost.goal_at(lin.horizon)
    return total + float(gap @ cost.Q @ gap)


def bounded_cognition_solve(rs: ReducedState, cost_a: CostSpec, cost_d: CostSpec, cfg: SolverConfig,
                            dp: DynamicsParams, k: KernelConfig, u_prev: MessagePair) -> StackelbergSolution:
    """Level-k iteration; unpacks as ``adversary, defender = bounded_cognition_solve(...)``."""
    dynamics = ReducedMap.from_state(rs, dp, k)
    start = rs.centers.ravel()
    n = dynamics.state_dim
    adversary = FeedbackPolicy.constant(u_prev.u_a, cfg.horizon, n, ADVERSARY)
    defender = FeedbackPolicy.constant(u_prev.u_d, cfg.horizon, n, DEFENDER)
    traj = rollout_closed_loop(dynamics, start, adversary, defender, level=0)
    lin = linearize(traj, cfg)

    records: List[LevelRecord] = []
    for level in range(1, cfg.max_level + 1):
        before = linearized_objective(lin, defender, adversary, cost_d)
        defender = lqr_best_response(lin, adversary, cost_d, DEFENDER, level)
        after = linearized_objective(lin, defender, adversary, cost_d)
        adversary = lqr_best_response(lin, defender, cost_a, ADVERSARY, level)
        adv_obj = linearized_objective(lin, adversary, defender, cost_a)
        records.append(LevelRecord(level, before, after, adv_obj))
        logger.debug('level %d: defender %.6g -> %.6g, adversary %.6g', level, before, after, adv_obj)
        if cfg.reroll_each_level:
            traj = rollout_closed_loop(dynamics, start, adversary, defender, level)
            lin = linearize(traj, cfg)

    # Stackelberg order: the follower answers the leader's final policy
    defender = lqr_best_response(lin, adversary, cost_d, DEFENDER, cfg.max_level)
    return StackelbergSolution(adversary.rebase(lin.states), defender, lin, records)


def cold_start_messages(p: Population, cost_a: PlayerCost) -> MessagePair:
    """Messages assumed for t = 0: population mean for the defender, unit goal direction for the adversary."""
    mean = p.opinions.mean(axis=0)
    target = cost_a.target
    if target is not None and np.linalg.norm(target) > 0:
        u_a = target / np.linalg.norm(target)
    else:
        u_a = mean
    return MessagePair(u_a, mean)


def receding_horizon_run(p: Population, cost_a: PlayerCost, cost_d: PlayerCost, cfg: SolverConfig,
                         dp: DynamicsParams, k: KernelConfig, cluster_cfg: ClusteringConfig,
                         u_prev: Optional[MessagePair] = None) -> Trace:
    if cost_a.d != p.d or cost_d.d != p.d:
        raise InvalidArgumentError(f'cost weights are {cost_a.d}/{cost_d.d}-dimensional, opinions are {p.d}-dimensional')
    trace = Trace.start(p, horizon=cfg.horizon, level=cfg.max_level)
    pop = p
    msgs = u_prev if u_prev is not None else cold_start_messages(p, cost_a)
    assignment = None
    t = 0
    while t < cfg.steps:
        try:
            if assignment is None:
                assignment = initial_clustering(pop, min(cluster_cfg.m0, pop.n))
            assignment = refresh(assignment, pop, cluster_cfg.split_threshold, cluster_cfg.merge_epsilon)
            if assignment.m < 2:
                assignment = initial_clustering(pop, 2)
            rs = reduce(assignment, pop, k, cluster_cfg.mass_weighted)
            solution = bounded_cognition_solve(rs, cost_a.for_reduced(rs), cost_d.for_reduced(rs), cfg, dp, k, msgs)
            for tau in range(min(cfg.replan_interval, cfg.steps - t)):
                centers = group_means(pop.opinions, assignment.labels, assignment.m).ravel()
                msgs = MessagePair(solution.adversary.act(tau, centers), solution.defender.act(tau, centers))
                pop = opinion_step(pop, msgs, dp, k)
                trace.record(pop.opinions, msgs.u_a, msgs.u_d, assignment.labels, cost_a, cost_d)
                t += 1
        except (NumericError, InvalidArgumentError, UndefinedStatisticError) as exc:
            logger.warning('run aborted at t=%d: %s', t, exc)
            trace.abort(f't={t}: {exc}')
            break
        logger.info('t=%d clusters=%d u_a=%s u_d=%s', t, assignment.m,
                    np.array2string(msgs.u_a, precision=4), np.array2string(msgs.u_d, precision=4))
    return trace
