"""Static clusters and the worker-cluster eligibility matrix.

Workers are first laid out into ``P`` disjoint static clusters of size
``ell`` (the base block).  To give the scheduler room to move workers
between clusters, each worker is then made eligible for ``n`` clusters in
total: the eligibility matrix stacks the base block with ``n - 1`` extra
blocks, each row of an extra block being a circular shift of the matching
base row by a random amount in ``{1, ..., P-1}``.  Column ``p`` of the
stacked matrix lists the ``ell * n`` workers that hold cluster ``p``'s
codewords; a worker's stored mini-batches are the union over its ``n``
clusters, i.e. ``n * ell`` batches.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

MAX_SHIFT_RETRIES = 1000


@dataclass(frozen=True)
class StaticClusters:
    """Base-block layout: P disjoint worker sets and their batch ranges."""

    num_workers: int
    num_clusters: int
    ell: int
    rows: tuple[tuple[int, ...], ...]      # ell rows of P worker ids
    columns: tuple[tuple[int, ...], ...]   # per cluster, workers in row order
    batch_sets: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class ClusterAssignment:
    """Eligibility matrix plus the per-worker views derived from it."""

    num_workers: int
    num_clusters: int
    ell: int
    n: int
    static: StaticClusters
    matrix: np.ndarray                       # ell * n rows x P columns
    worker_clusters: tuple[tuple[int, ...], ...]  # per worker, n cluster ids
    worker_batches: tuple[tuple[int, ...], ...]   # per worker, n * ell batch ids
    columns: tuple[frozenset[int], ...]      # per cluster, eligible worker set

    @property
    def P(self) -> int:
        return self.num_clusters

    @property
    def K(self) -> int:
        return self.num_workers

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.matrix:
                writer.writerow([int(w) for w in row])


def build_static_clusters(num_workers: int, num_clusters: int) -> StaticClusters:
    """Lay out ``num_workers`` into ``num_clusters`` columns of ``ell`` rows.

    Row ``j`` holds workers ``jP .. jP+P-1``; odd rows are rolled left by one
    so that e.g. K=12, P=4 yields columns {0,5,8}, {1,6,9}, {2,7,10}, {3,4,11}.
    Cluster ``p`` owns the contiguous batches ``p*ell .. (p+1)*ell - 1``.
    """
    if num_clusters < 1:
        raise ConfigurationError("num_clusters must be at least 1")
    if num_workers % num_clusters != 0:
        raise ConfigurationError(
            f"num_clusters={num_clusters} must divide num_workers={num_workers}"
        )
    ell = num_workers // num_clusters
    rows = []
    for j in range(ell):
        block = np.arange(j * num_clusters, (j + 1) * num_clusters)
        rows.append(tuple(int(w) for w in np.roll(block, -(j % 2))))
    columns = tuple(tuple(row[p] for row in rows) for p in range(num_clusters))
    batch_sets = tuple(
        tuple(range(p * ell, (p + 1) * ell)) for p in range(num_clusters)
    )
    return StaticClusters(
        num_workers=num_workers,
        num_clusters=num_clusters,
        ell=ell,
        rows=tuple(rows),
        columns=columns,
        batch_sets=batch_sets,
    )


def _row_collides(matrix_rows: list[list[int]], candidate: Sequence[int]) -> bool:
    # A worker may appear at most once per column across all blocks.
    for existing in matrix_rows:
        for p, worker in enumerate(candidate):
            if existing[p] == worker:
                return True
    return False


def build_cluster_assignment(
    static: StaticClusters,
    n: int,
    seed,
    shifts: Sequence[Sequence[int]] | None = None,
) -> ClusterAssignment:
    """Stack the base block with ``n - 1`` randomly shifted copies.

    Shift amounts are sampled uniformly from ``{1, ..., P-1}`` per row and
    resampled if the shifted row would assign a worker twice to the same
    cluster.  ``shifts[b][j]`` pins the shift of row ``j`` in extra block
    ``b`` (for reproducing known matrices in tests).
    """
    P = static.num_clusters
    ell = static.ell
    if not 1 <= n <= P:
        raise ConfigurationError(
            f"memberships n={n} must satisfy 1 <= n <= P={P} "
            "(a worker cannot join more distinct clusters than exist)"
        )
    if shifts is not None and len(shifts) != n - 1:
        raise ConfigurationError("one shift row per extra block is required")
    rng = np.random.default_rng(seed)
    matrix_rows = [list(row) for row in static.rows]
    for b in range(n - 1):
        for j in range(ell):
            base = np.asarray(static.rows[j])
            if shifts is not None:
                s = int(shifts[b][j])
                if not 1 <= s <= P - 1:
                    raise ConfigurationError("pinned shift outside {1, ..., P-1}")
                candidate = [int(w) for w in np.roll(base, s)]
                if _row_collides(matrix_rows, candidate):
                    raise ConfigurationError("pinned shifts duplicate a membership")
            else:
                for _ in range(MAX_SHIFT_RETRIES):
                    s = int(rng.integers(1, P))
                    candidate = [int(w) for w in np.roll(base, s)]
                    if not _row_collides(matrix_rows, candidate):
                        break
                else:
                    raise ConfigurationError(
                        f"could not find a collision-free shift for row {j}"
                    )
            matrix_rows.append(candidate)
    matrix = np.asarray(matrix_rows, dtype=int)

    worker_clusters: list[list[int]] = [[] for _ in range(static.num_workers)]
    for b in range(n):
        for j in range(ell):
            for p in range(P):
                worker_clusters[matrix[b * ell + j, p]].append(p)
    for k, clusters in enumerate(worker_clusters):
        if len(set(clusters)) != n:
            raise ConfigurationError(f"worker {k} assigned twice to one cluster")
    worker_batches = tuple(
        tuple(sorted(set().union(*(static.batch_sets[p] for p in clusters))))
        for clusters in worker_clusters
    )
    columns = tuple(
        frozenset(int(w) for w in matrix[:, p]) for p in range(P)
    )
    for p, col in enumerate(columns):
        if len(col) != ell * n:
            raise ConfigurationError(f"cluster {p} has duplicate eligible workers")
    return ClusterAssignment(
        num_workers=static.num_workers,
        num_clusters=P,
        ell=ell,
        n=n,
        static=static,
        matrix=matrix,
        worker_clusters=tuple(tuple(c) for c in worker_clusters),
        worker_batches=worker_batches,
        columns=columns,
    )


def eligible_workers(assign: ClusterAssignment, cluster: int) -> frozenset[int]:
    """The ell * n workers holding ``cluster``'s codewords (its column)."""
    if not 0 <= cluster < assign.num_clusters:
        raise ConfigurationError(f"cluster index {cluster} out of range")
    return assign.columns[cluster]
