"""Two-state Markov worker speeds and shifted-exponential completion times.

Each worker sits in a slow or a fast state; at the start of every iteration
it independently switches state with probability ``switch_prob``.  A worker
in state with rate ``mu`` finishes ``s`` unit computations by time
``t = s * (alpha + E / mu)`` with ``E`` a unit exponential, i.e. the CDF is
``F_s(t) = 1 - exp(-mu * (t / s - alpha))`` for ``t >= s * alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

FAST = True
SLOW = False


@dataclass(frozen=True)
class LatencyParams:
    mu_slow: float
    mu_fast: float
    alpha: float
    switch_prob: float

    def __post_init__(self) -> None:
        if not 0 < self.mu_slow <= self.mu_fast:
            raise ConfigurationError("rates must satisfy mu_fast >= mu_slow > 0")
        if self.alpha < 0:
            raise ConfigurationError("alpha must be non-negative")
        if not 0 <= self.switch_prob <= 1:
            raise ConfigurationError("switch_prob must be a probability")

    def rate(self, fast: bool) -> float:
        return self.mu_fast if fast else self.mu_slow


def initial_states(
    num_workers: int,
    slow_count: int | None,
    slow_ids,
    rng: np.random.Generator,
) -> np.ndarray:
    """Boolean state vector (True = fast) with the configured slow set."""
    states = np.ones(num_workers, dtype=bool)
    if slow_ids is not None:
        ids = [int(k) for k in slow_ids]
        if any(not 0 <= k < num_workers for k in ids) or len(set(ids)) != len(ids):
            raise ConfigurationError("initial slow ids must be distinct worker ids")
        states[ids] = SLOW
    elif slow_count is not None:
        if not 0 <= slow_count <= num_workers:
            raise ConfigurationError("initial slow count out of range")
        chosen = rng.choice(num_workers, size=slow_count, replace=False)
        states[chosen] = SLOW
    return states


def step_states(
    states: np.ndarray, switch_prob: float, rng: np.random.Generator
) -> np.ndarray:
    """Advance the chain one iteration: each worker flips w.p. switch_prob."""
    flips = rng.random(states.shape[0]) < switch_prob
    return states ^ flips


def sample_completion_time(
    fast: bool, s: int, params: LatencyParams, rng
) -> float:
    """One worker's time to finish ``s`` computations."""
    if s < 1:
        raise ConfigurationError("computation count s must be at least 1")
    return s * (params.alpha + rng.exponential() / params.rate(fast))


def sample_completion_times(
    states: np.ndarray, s: int, params: LatencyParams, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized completion times for all workers at once."""
    if s < 1:
        raise ConfigurationError("computation count s must be at least 1")
    mu = np.where(states, params.mu_fast, params.mu_slow)
    return s * (params.alpha + rng.exponential(size=states.shape[0]) / mu)


def completion_cdf(t, s: int, mu: float, alpha: float):
    """Closed-form F_s(t); broadcasting over ``t``."""
    t = np.asarray(t, dtype=float)
    return np.where(t >= s * alpha, 1.0 - np.exp(-mu * (t / s - alpha)), 0.0)


def to_straggler_vector(states: np.ndarray) -> np.ndarray:
    """1 for fast (non-straggler), 0 for slow (straggler)."""
    return np.asarray(states, dtype=bool).astype(int)
