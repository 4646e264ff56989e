"""Synchronous-GD iteration loop under the four completion-time schemes.

Per iteration every worker computes ``r`` partial gradients and uploads one
codeword, so its finish time is one draw of the latency model with ``s = r``.
The parameter server's completion time is then a pure order statistic of the
sampled finish times:

* ``GC``    waits for the (K - r + 1)-th finisher overall;
* ``GC-SC`` waits, per static cluster, for its (ell - r + 1)-th finisher and
  takes the slowest cluster;
* ``GC-DC`` does the same over the dynamically re-formed clusters;
* ``LB``    waits for the P * (ell - r + 1)-th finisher overall, as if any
  sufficiently large set of results decoded.

All schemes score the SAME finish-time vector each iteration, which pairs
the comparison and keeps improvement estimates tight at small seed counts.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import latency, placement
from .assignment import build_cluster_assignment, build_static_clusters
from .errors import ConfigurationError
from .latency import LatencyParams

SCHEMES = ("GC", "GC-SC", "GC-DC", "LB")
SSI_MODES = ("previous", "perfect")


@dataclass(frozen=True)
class IterationRecord:
    seed: int
    iteration: int
    scheme: str
    completion_time: float
    straggler_count: int
    spread: tuple[int, ...]
    recovery: bool
    fallback: bool

    @property
    def max_spread(self) -> int:
        return max(self.spread) if self.spread else 0


@dataclass(frozen=True)
class ExperimentConfig:
    num_workers: int
    num_clusters: int
    load: int                      # partial gradients per worker per iteration
    memberships: int               # clusters each worker is eligible for
    iterations: int
    latency: LatencyParams
    initial_slow_count: int | None = None
    initial_slow_ids: tuple[int, ...] | None = None
    ssi_mode: str = "previous"
    schemes: tuple[str, ...] = SCHEMES
    master_seed: int = 0
    num_seeds: int = 1
    trainer_enabled: bool = False
    train_size: int = 2000
    test_size: int = 400
    model_dim: int = 1000
    learning_rate: float = 0.1
    name: str = "experiment"

    @property
    def ell(self) -> int:
        return self.num_workers // self.num_clusters

    def validate(self) -> None:
        if self.num_clusters < 1 or self.num_workers < 1:
            raise ConfigurationError("worker and cluster counts must be positive")
        if self.num_workers % self.num_clusters != 0:
            raise ConfigurationError(
                f"num_clusters={self.num_clusters} must divide num_workers={self.num_workers}"
            )
        if not 1 <= self.load <= self.ell:
            raise ConfigurationError(
                f"load={self.load} must satisfy 1 <= load <= ell={self.ell}"
            )
        if not 1 <= self.memberships <= self.num_clusters:
            raise ConfigurationError(
                f"memberships={self.memberships} must satisfy 1 <= n <= P={self.num_clusters}"
            )
        if self.iterations < 1 or self.num_seeds < 1:
            raise ConfigurationError("iterations and num_seeds must be positive")
        if self.ssi_mode not in SSI_MODES:
            raise ConfigurationError(f"ssi_mode must be one of {SSI_MODES}")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown or not self.schemes:
            raise ConfigurationError(f"unknown schemes: {unknown or 'empty'}")
        if self.initial_slow_ids is not None and self.initial_slow_count is not None:
            raise ConfigurationError("give initial_slow_ids or initial_slow_count, not both")
        if self.initial_slow_ids is not None:
            ids = self.initial_slow_ids
            if len(set(ids)) != len(ids) or any(
                not 0 <= k < self.num_workers for k in ids
            ):
                raise ConfigurationError("initial_slow_ids must be distinct worker ids")
        if self.initial_slow_count is not None and not (
            0 <= self.initial_slow_count <= self.num_workers
        ):
            raise ConfigurationError("initial_slow_count out of range")
        if self.trainer_enabled:
            if min(self.train_size, self.test_size, self.model_dim) < 1:
                raise ConfigurationError("trainer sizes must be positive")
            if self.train_size < self.num_workers:
                raise ConfigurationError("train_size must be at least num_workers")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[IterationRecord] = field(default_factory=list)

    def records_for(self, scheme: str) -> list[IterationRecord]:
        return [rec for rec in self.records if rec.scheme == scheme]

    def mean_completion(self, scheme: str) -> float:
        return float(np.mean([r.completion_time for r in self.records_for(scheme)]))


def kth_smallest(values: np.ndarray, k: int) -> float:
    """The k-th smallest value, 1-indexed."""
    return float(np.partition(np.asarray(values, dtype=float), k - 1)[k - 1])


def completion_time_gc(finish_times: np.ndarray, r: int) -> float:
    """Unclustered scheme: wait for the (K - r + 1)-th finisher."""
    K = len(finish_times)
    if K < r:
        raise ConfigurationError("need at least r workers")
    return kth_smallest(finish_times, K - r + 1)


def completion_time_clustered(
    finish_times: np.ndarray,
    members: Sequence[Sequence[int]],
    r: int,
) -> float:
    """Clustered scheme: slowest cluster's (ell - r + 1)-th finisher."""
    times = np.asarray(finish_times, dtype=float)
    worst = 0.0
    for ms in members:
        ell = len(ms)
        worst = max(worst, kth_smallest(times[list(ms)], ell - r + 1))
    return worst


def completion_time_lb(finish_times: np.ndarray, P: int, ell: int, r: int) -> float:
    """Lower bound: the earliest P * (ell - r + 1) finishers anywhere suffice."""
    need = P * (ell - r + 1)
    if need > len(finish_times):
        raise ConfigurationError("P * (ell - r + 1) exceeds the worker count")
    return kth_smallest(finish_times, need)


def run_seed(config: ExperimentConfig, seed_index: int) -> list[IterationRecord]:
    """One deterministic simulation run; independent of all other seeds."""
    config.validate()
    K, P, r = config.num_workers, config.num_clusters, config.load
    ell = config.ell
    root = np.random.SeedSequence(entropy=[config.master_seed, seed_index])
    assign_seq, dynamics_seq = root.spawn(2)
    rng = np.random.default_rng(dynamics_seq)

    static = build_static_clusters(K, P)
    assign = build_cluster_assignment(static, config.memberships, assign_seq)
    static_members = placement.static_placement(assign).members

    states = latency.initial_states(
        K, config.initial_slow_count, config.initial_slow_ids, rng
    )
    prev_states = states.copy()

    records: list[IterationRecord] = []
    for t in range(1, config.iterations + 1):
        states = latency.step_states(states, config.latency.switch_prob, rng)
        times = latency.sample_completion_times(states, r, config.latency, rng)
        s_now = latency.to_straggler_vector(states)
        straggler_count = int(K - s_now.sum())

        lb_time = completion_time_lb(times, P, ell, r)
        per_scheme: dict[str, IterationRecord] = {}
        for scheme in config.schemes:
            fallback = False
            if scheme == "GC":
                q = completion_time_gc(times, r)
                spread = (straggler_count,)
                recovery = K - straggler_count >= K - r + 1
            elif scheme == "GC-SC":
                q = completion_time_clustered(times, static_members, r)
                spread = tuple(
                    int(len(ms) - s_now[list(ms)].sum()) for ms in static_members
                )
                recovery = all(
                    int(s_now[list(ms)].sum()) >= ell - r + 1 for ms in static_members
                )
            elif scheme == "GC-DC":
                observed = (
                    latency.to_straggler_vector(prev_states)
                    if config.ssi_mode == "previous"
                    else s_now
                )
                placed = placement.greedy_place(assign, observed)
                q = completion_time_clustered(times, placed.members, r)
                spread = placement.straggler_spread(placed, s_now)
                recovery = placement.full_recovery_possible(placed, s_now, r)
                fallback = placed.fallback_used
            elif scheme == "LB":
                q = lb_time
                spread = (straggler_count,)
                recovery = K - straggler_count >= P * (ell - r + 1)
            else:  # pragma: no cover - validate() rejects unknown schemes
                raise ConfigurationError(f"unknown scheme {scheme}")
            if q < lb_time:
                raise AssertionError(
                    f"{scheme} beat the lower bound at iteration {t}: {q} < {lb_time}"
                )
            per_scheme[scheme] = IterationRecord(
                seed=seed_index,
                iteration=t,
                scheme=scheme,
                completion_time=q,
                straggler_count=straggler_count,
                spread=spread,
                recovery=bool(recovery),
                fallback=fallback,
            )
        records.extend(per_scheme[s] for s in config.schemes)
        prev_states = states
    return records


def run_experiment(config: ExperimentConfig, parallel: int = 1) -> ExperimentResult:
    """All seeds of an experiment, merged in seed order regardless of executor."""
    config.validate()
    result = ExperimentResult(config=config)
    if parallel > 1 and config.num_seeds > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            chunks = list(
                pool.map(run_seed, [config] * config.num_seeds, range(config.num_seeds))
            )
    else:
        chunks = [run_seed(config, i) for i in range(config.num_seeds)]
    for chunk in chunks:
        result.records.extend(chunk)
    return result


def with_overrides(config: ExperimentConfig, **kwargs) -> ExperimentConfig:
    return replace(config, **kwargs)
