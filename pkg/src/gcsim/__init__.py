"""Coded distributed gradient descent with dynamic straggler-balancing clustering."""

from .assignment import (
    ClusterAssignment,
    StaticClusters,
    build_cluster_assignment,
    build_static_clusters,
    eligible_workers,
)
from .codes import (
    ClusterCode,
    CodewordSpec,
    Partition,
    build_cluster_code,
    decode_full_gradient,
    encode,
    partition_dataset,
    solve_decoding,
)
from .latency import (
    LatencyParams,
    sample_completion_time,
    sample_completion_times,
    step_states,
    to_straggler_vector,
)
from .placement import (
    Placement,
    availability_order,
    full_recovery_possible,
    greedy_place,
    static_placement,
    straggler_spread,
)
from .simulator import (
    SCHEMES,
    ExperimentConfig,
    ExperimentResult,
    IterationRecord,
    completion_time_clustered,
    completion_time_gc,
    completion_time_lb,
    run_experiment,
    run_seed,
)
from .trainer import SyntheticDataset, generate_synthetic, partial_gradient, train

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment",
    "ClusterCode",
    "CodewordSpec",
    "ExperimentConfig",
    "ExperimentResult",
    "IterationRecord",
    "LatencyParams",
    "Partition",
    "Placement",
    "SCHEMES",
    "StaticClusters",
    "SyntheticDataset",
    "availability_order",
    "build_cluster_assignment",
    "build_cluster_code",
    "build_static_clusters",
    "completion_time_clustered",
    "completion_time_gc",
    "completion_time_lb",
    "decode_full_gradient",
    "eligible_workers",
    "encode",
    "full_recovery_possible",
    "generate_synthetic",
    "greedy_place",
    "partial_gradient",
    "partition_dataset",
    "run_experiment",
    "run_seed",
    "sample_completion_time",
    "sample_completion_times",
    "solve_decoding",
    "static_placement",
    "step_states",
    "straggler_spread",
    "to_straggler_vector",
    "train",
]
