"""Synthetic linear-regression training that runs the codes for real.

A full gradient descent where each iteration's gradient is recovered by
decoding the earliest sufficient codewords under the clustered scheme.
Decoding is exact linear algebra, so straggling changes WHEN the update is
available, never WHAT it is: the coded trajectory must match plain GD on
the same data to numerical precision, and that equality is asserted every
iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import latency
from .assignment import build_static_clusters
from .codes import ClusterCode, build_cluster_code, encode, decode_full_gradient, partition_dataset
from .errors import ConfigurationError, DecodeFailureError
from .simulator import ExperimentConfig

DECODE_RTOL = 1e-9


@dataclass(frozen=True)
class SyntheticDataset:
    train_x: np.ndarray
    train_y: np.ndarray
    test_x: np.ndarray
    test_y: np.ndarray
    true_model: np.ndarray


@dataclass
class TrainResult:
    train_mse: np.ndarray
    test_mse: np.ndarray
    theta: np.ndarray
    iterates: list[np.ndarray] | None = None
    max_decode_error: float = 0.0


def generate_synthetic(
    train_size: int,
    test_size: int,
    dim: int,
    seed: int,
    noise_scale: float = 1.0,
) -> SyntheticDataset:
    """Standard-normal design, standard-normal true model, additive noise."""
    if min(train_size, test_size, dim) < 1:
        raise ConfigurationError("dataset sizes must be positive")
    rng = np.random.default_rng(seed)
    true_model = rng.standard_normal(dim)
    train_x = rng.standard_normal((train_size, dim))
    test_x = rng.standard_normal((test_size, dim))
    train_y = train_x @ true_model + noise_scale * rng.standard_normal(train_size)
    test_y = test_x @ true_model + noise_scale * rng.standard_normal(test_size)
    return SyntheticDataset(train_x, train_y, test_x, test_y, true_model)


def partial_gradient(
    theta: np.ndarray, batch: tuple[int, int], dataset: SyntheticDataset
) -> np.ndarray:
    """Batch-averaged squared-error gradient: (2/|D|) X^T (X theta - y)."""
    start, stop = batch
    x = dataset.train_x[start:stop]
    y = dataset.train_y[start:stop]
    return (2.0 / (stop - start)) * (x.T @ (x @ theta - y))


def mean_squared_error(theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
    residual = x @ theta - y
    return float(np.mean(residual * residual))


def build_cluster_codes(config: ExperimentConfig) -> list[ClusterCode]:
    ell = config.ell
    return [
        build_cluster_code(
            ell,
            config.load,
            seed=config.master_seed,
            cluster=p,
            batch_offset=p * ell,
        )
        for p in range(config.num_clusters)
    ]


def train(
    config: ExperimentConfig,
    dataset: SyntheticDataset,
    record_iterates: bool = False,
) -> TrainResult:
    """Decoded-gradient descent for ``config.iterations`` steps.

    Each iteration samples worker finish times, takes each cluster's earliest
    ``ell - r + 1`` codewords, decodes, and checks the result against the
    directly averaged gradient before applying the update.
    """
    config.validate()
    if not config.trainer_enabled:
        raise ConfigurationError("trainer is not enabled in this configuration")
    K, P, r = config.num_workers, config.num_clusters, config.load
    ell = config.ell
    part = partition_dataset(dataset.train_x.shape[0], K)
    static = build_static_clusters(K, P)
    codes = build_cluster_codes(config)

    root = np.random.SeedSequence(entropy=[config.master_seed, 0])
    _, dynamics_seq = root.spawn(2)
    rng = np.random.default_rng(dynamics_seq)
    states = latency.initial_states(
        K, config.initial_slow_count, config.initial_slow_ids, rng
    )

    theta = np.zeros(config.model_dim)
    train_mse = np.empty(config.iterations)
    test_mse = np.empty(config.iterations)
    iterates: list[np.ndarray] | None = [] if record_iterates else None
    worst_gap = 0.0

    for t in range(config.iterations):
        states = latency.step_states(states, config.latency.switch_prob, rng)
        times = latency.sample_completion_times(states, r, config.latency, rng)

        grads = [partial_gradient(theta, part.batch_bounds[k], dataset) for k in range(K)]
        received = []
        for p in range(P):
            code = codes[p]
            column = static.columns[p]
            by_speed = sorted(range(ell), key=lambda slot: times[column[slot]])
            got = {}
            for slot in by_speed[: ell - r + 1]:
                spec = code.codewords[slot]
                got[slot] = encode(code, slot, [grads[b] for b in spec.support])
            received.append(got)
        decoded = decode_full_gradient(codes, received)

        direct = np.mean(grads, axis=0)
        scale = max(float(np.linalg.norm(direct)), 1e-30)
        gap = float(np.linalg.norm(decoded - direct)) / scale
        worst_gap = max(worst_gap, gap)
        if gap > DECODE_RTOL:
            raise DecodeFailureError(
                f"iteration {t + 1}: decoded gradient off by {gap:.3e} relative"
            )

        theta = theta - config.learning_rate * decoded
        if iterates is not None:
            iterates.append(theta.copy())
        train_mse[t] = mean_squared_error(theta, dataset.train_x, dataset.train_y)
        test_mse[t] = mean_squared_error(theta, dataset.test_x, dataset.test_y)

    return TrainResult(
        train_mse=train_mse,
        test_mse=test_mse,
        theta=theta,
        iterates=iterates,
        max_decode_error=worst_gap,
    )


def write_training_csv(path, result: TrainResult) -> None:
    import csv
    import os

    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "train_mse", "test_mse"])
        for t, (a, b) in enumerate(zip(result.train_mse, result.test_mse), start=1):
            writer.writerow([t, repr(float(a)), repr(float(b))])
    os.replace(tmp, path)
