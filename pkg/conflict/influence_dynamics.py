"""Message exposure, micro-time evidence diffusion and the macro-time opinion map.

One macro step: both players place a message in opinion space, every
individual observes each message (with kernel probability, or through its
contacts when the message is seeded near its position), evidence diffuses over
the homophily graph until it settles, and opinions move toward the message
their evidence favours while staying anchored to x_0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.special import expit

from conflict.exceptions import InvalidArgumentError, NumericError
from conflict.graph_model import KernelConfig, Population, kernel_matrix, weight_matrix

# kernel: each individual sees a message with probability psi(u, x_i).
# seeded: the message starts at individuals near u and is seen through contacts.
EXPOSURE_MODELS = ('kernel', 'seeded')


@dataclass(frozen=True)
class DynamicsParams:
    alpha: float = 0.3           # sharing probability
    kappa_a: float = 0.5         # adversary interest decay
    kappa_d: float = 0.5         # defender interest decay
    stubbornness: float = 0.7    # lambda
    eta: float = 0.5             # learning rate
    sigmoid_gain: float = 1.0
    clamp_rate: bool = True      # min(eta |y|, 1)
    exposure: str = 'kernel'

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise InvalidArgumentError(f'alpha must lie in [0, 1), got {self.alpha}')
        for name in ('kappa_a', 'kappa_d', 'sigmoid_gain'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidArgumentError(f'{name} must be positive, got {value}')
        if not (0.0 <= self.stubbornness <= 1.0):
            raise InvalidArgumentError(f'stubbornness must lie in [0, 1], got {self.stubbornness}')
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise InvalidArgumentError(f'eta must be non-negative, got {self.eta}')
        if self.exposure not in EXPOSURE_MODELS:
            raise InvalidArgumentError(f'unknown exposure model {self.exposure!r}; expected one of {EXPOSURE_MODELS}')


@dataclass(frozen=True, eq=False)
class MessagePair:
    u_a: np.ndarray
    u_d: np.ndarray

    def __post_init__(self):
        u_a = np.asarray(self.u_a, dtype=float).ravel()
        u_d = np.asarray(self.u_d, dtype=float).ravel()
        if u_a.shape != u_d.shape:
            raise InvalidArgumentError(f'message dimensions differ: {u_a.size} vs {u_d.size}')
        if not (np.all(np.isfinite(u_a)) and np.all(np.isfinite(u_d))):
            raise InvalidArgumentError('messages must be finite')
        object.__setattr__(self, 'u_a', u_a)
        object.__setattr__(self, 'u_d', u_d)


def decay_weight(kappa: float) -> float:
    """e^{-kappa} / (1 - e^{-kappa}), the forcing sum from s = 1."""
    return 1.0 / math.expm1(kappa)


def exposure(u: np.ndarray, opinions: np.ndarray, k: KernelConfig) -> np.ndarray:
    u = np.asarray(u, dtype=float).reshape(1, -1)
    return kernel_matrix(u, opinions, k)[0]


def exposure_probabilities(u, p: Population, k: KernelConfig) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    if u.size != p.d:
        raise InvalidArgumentError(f'message has dimension {u.size}, population has {p.d}')
    return exposure(u, p.opinions, k)


def seeded_exposure(u: np.ndarray, opinions: np.ndarray, w: np.ndarray, k: KernelConfig,
                    masses: Optional[np.ndarray] = None) -> np.ndarray:
    """Exposure when a message spreads from the individuals whose opinions resemble it.

    Seeds are psi(u, x_j), rescaled so their (mass-weighted) mean is 1;
    individual i sees ``sum_j W_ij seed_j``. An even seeding yields exposure
    1 everywhere, so on a near-complete graph the message position stops
    mattering.
    """
    seeds = exposure(u, opinions, k)
    weights = np.ones_like(seeds) if masses is None else np.asarray(masses, dtype=float)
    level = np.dot(weights, seeds) / weights.sum()
    return np.asarray(w, dtype=float) @ (seeds / level)


def seeded_exposure_probabilities(u, p: Population, k: KernelConfig) -> np.ndarray:
    u = np.asarray(u, dtype=float).ravel()
    if u.size != p.d:
        raise InvalidArgumentError(f'message has dimension {u.size}, population has {p.d}')
    return seeded_exposure(u, p.opinions, weight_matrix(p.opinions, k), k)


def propagate_micro(w: np.ndarray, p_a: np.ndarray, p_d: np.ndarray, dp: DynamicsParams,
                    s_max: int, forcing_start: int = 0) -> np.ndarray:
    """Iterate y_{s+1} = alpha W y_s - p_a e^{-kappa_a (s+o)} + p_d e^{-kappa_d (s+o)} from y_0 = 0.

    Returns the (s_max + 1) x n array of y_0..y_{s_max}. ``forcing_start`` is
    the offset o; o = 1 is the indexing whose infinite sum equals
    ``accumulated_evidence``.
    """
    if s_max < 1:
        raise InvalidArgumentError(f's_max must be >= 1, got {s_max}')
    w = np.asarray(w, dtype=float)
    p_a = np.asarray(p_a, dtype=float)
    p_d = np.asarray(p_d, dtype=float)
    ys = np.zeros((s_max + 1, w.shape[0]))
    for s in range(s_max):
        step = s + forcing_start
        ys[s + 1] = dp.alpha * (w @ ys[s]) - p_a * math.exp(-dp.kappa_a * step) + p_d * math.exp(-dp.kappa_d * step)
    return ys


def accumulated_evidence(w: np.ndarray, p_a: np.ndarray, p_d: np.ndarray, dp: DynamicsParams) -> np.ndarray:
    """Closed-form total evidence (I - alpha W)^{-1} [p_d c_d - p_a c_a]."""
    w = np.asarray(w, dtype=float)
    rhs = np.asarray(p_d, dtype=float) * decay_weight(dp.kappa_d) - np.asarray(p_a, dtype=float) * decay_weight(dp.kappa_a)
    system = np.eye(w.shape[0]) - dp.alpha * w
    try:
        evidence = scipy.linalg.solve(system, rhs, check_finite=False)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NumericError(f'evidence system could not be solved: {exc}') from exc
    if not np.all(np.isfinite(evidence)):
        raise NumericError('evidence system produced non-finite values')
    return evidence


def sigmoid(y, dp: DynamicsParams):
    return expit(dp.sigmoid_gain * np.asarray(y, dtype=float))


def opinion_update(opinions: np.ndarray, initial: np.ndarray, evidence: np.ndarray,
                   msgs: MessagePair, dp: DynamicsParams) -> np.ndarray:
    """Friedkin-Johnsen style step driven by the accumulated evidence of every individual."""
    rate = dp.eta * np.abs(evidence)
    if dp.clamp_rate:
        rate = np.minimum(rate, 1.0)
    share = sigmoid(evidence, dp)[:, None]
    pull = share * msgs.u_d[None, :] + (1.0 - share) * msgs.u_a[None, :]
    lam = dp.stubbornness
    return (1.0 - lam) * initial + lam * (opinions + rate[:, None] * (pull - opinions))


def opinion_map(opinions: np.ndarray, initial: np.ndarray, msgs: MessagePair, dp: DynamicsParams,
                k: KernelConfig, masses: Optional[np.ndarray] = None) -> np.ndarray:
    """The map F on raw arrays; shared by the full population and the cluster centres."""
    w = weight_matrix(opinions, k, masses)
    if dp.exposure == 'seeded':
        p_a = seeded_exposure(msgs.u_a, opinions, w, k, masses)
        p_d = seeded_exposure(msgs.u_d, opinions, w, k, masses)
    else:
        p_a = exposure(msgs.u_a, opinions, k)
        p_d = exposure(msgs.u_d, opinions, k)
    evidence = accumulated_evidence(w, p_a, p_d, dp)
    return opinion_update(opinions, initial, evidence, msgs, dp)


def opinion_step(p: Population, msgs: MessagePair, dp: DynamicsParams, k: KernelConfig) -> Population:
    if msgs.u_a.size != p.d:
        raise InvalidArgumentError(f'messages have dimension {msgs.u_a.size}, population has {p.d}')
    return p.with_opinions(opinion_map(p.opinions, p.initial_opinions, msgs, dp, k))
