"""Per-cluster gradient codes: construction, encoding, and decoding.

Each cluster of ``ell`` workers runs an independent linear code over the
cluster's ``ell`` mini-batches.  Worker slot ``i`` computes the ``r`` partial
gradients in its cyclic window ``{i, i+1, ..., i+r-1} (mod ell)`` and uploads
a single linear combination of them (its codeword).  The code is built so
that ANY ``ell - r + 1`` codewords suffice to reconstruct the uniform average
of the cluster's batch gradients, i.e. up to ``r - 1`` missing workers per
cluster are tolerated.

Coefficient generation: every codeword row is forced into a fixed
``(ell - r + 1)``-dimensional subspace that contains the all-ones vector.
Any ``ell - r + 1`` rows then span that subspace (generically), so the
uniform-average target is always reachable.  The random subspace is drawn
from a seeded stream and the resulting code is verified exhaustively at
construction; a failed draw is retried with the next derived seed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    CodeConstructionError,
    ConfigurationError,
    DecodeFailureError,
    NotDecodableError,
    NotEnoughResultsError,
)

RESIDUAL_TOL = 1e-9
CONDITION_BOUND = 1e8
MAX_BUILD_ATTEMPTS = 64


@dataclass(frozen=True)
class Partition:
    """Contiguous near-equal split of sample indices into mini-batches."""

    num_samples: int
    num_batches: int
    batch_bounds: tuple[tuple[int, int], ...]

    def batch_size(self, k: int) -> int:
        start, stop = self.batch_bounds[k]
        return stop - start


@dataclass(frozen=True)
class CodewordSpec:
    """One coded partial gradient: which batches it mixes and with what weights."""

    cluster: int
    slot: int
    support: tuple[int, ...]  # global mini-batch ids, window order
    coeffs: tuple[float, ...]


@dataclass(frozen=True)
class ClusterCode:
    """Verified code for one cluster of ``ell`` workers over ``ell`` batches."""

    ell: int
    r: int
    cluster: int
    batch_offset: int
    codewords: tuple[CodewordSpec, ...]
    # Dense ell x ell coefficient matrix over the cluster-local batch indices;
    # row i is slot i's codeword, zero outside its cyclic window.
    coefficient_rows: np.ndarray

    @property
    def decoding_threshold(self) -> int:
        return self.ell - self.r + 1

    @property
    def batch_ids(self) -> tuple[int, ...]:
        return tuple(range(self.batch_offset, self.batch_offset + self.ell))


def partition_dataset(num_samples: int, num_batches: int) -> Partition:
    """Split ``num_samples`` into ``num_batches`` contiguous near-equal ranges.

    The first ``num_samples % num_batches`` ranges get the extra sample, so
    sizes differ by at most one with larger batches first.
    """
    if num_batches < 1:
        raise ConfigurationError("num_batches must be at least 1")
    if num_samples < num_batches:
        raise ConfigurationError(
            f"cannot split {num_samples} samples into {num_batches} non-empty batches"
        )
    base, extra = divmod(num_samples, num_batches)
    bounds = []
    start = 0
    for k in range(num_batches):
        size = base + (1 if k < extra else 0)
        bounds.append((start, start + size))
        start += size
    return Partition(num_samples, num_batches, tuple(bounds))


def _cyclic_window(slot: int, ell: int, r: int) -> list[int]:
    return [(slot + j) % ell for j in range(r)]


def _candidate_rows(ell: int, r: int, rng: np.random.Generator) -> np.ndarray | None:
    """Draw one banded coefficient matrix whose rows share a common subspace.

    Returns None when a draw degenerates (a window entry lands too close to
    zero), in which case the caller retries with a fresh stream.
    """
    if r == ell:
        # Replication regime: a single codeword must already be proportional
        # to the cluster average, so each slot scales the all-ones row.
        scale = rng.uniform(0.5, 1.5, size=ell)
        return scale[:, None] * np.ones((ell, ell))

    # Subspace basis: the all-ones vector plus ell - r random directions.
    basis = np.vstack([np.ones(ell), rng.standard_normal((ell - r, ell))])
    rows = np.zeros((ell, ell))
    for slot in range(ell):
        window = _cyclic_window(slot, ell, r)
        outside = [j for j in range(ell) if j not in window]
        # The row must be a combination of basis rows that vanishes outside
        # the window: a null direction of the outside column block.
        _, _, vt = np.linalg.svd(basis[:, outside].T)
        row = vt[-1] @ basis
        peak = np.max(np.abs(row[window]))
        if peak < 1e-12 or np.min(np.abs(row[window])) < 1e-6 * peak:
            return None
        row = row / peak
        if row[window[0]] < 0:
            row = -row
        row[outside] = 0.0
        rows[slot] = row
    return rows


def _subset_solve(rows: np.ndarray, subset: Sequence[int]) -> tuple[np.ndarray, float]:
    """Least-squares decode weights for a subset of slots, plus the residual."""
    ell = rows.shape[1]
    system = rows[list(subset)].T  # ell equations, len(subset) unknowns
    target = np.full(ell, 1.0 / ell)
    weights, *_ = np.linalg.lstsq(system, target, rcond=None)
    residual = float(np.linalg.norm(system @ weights - target))
    return weights, residual


def _verify_rows(rows: np.ndarray, ell: int, r: int) -> bool:
    threshold = ell - r + 1
    for subset in itertools.combinations(range(ell), threshold):
        system = rows[list(subset)].T
        if np.linalg.cond(system) > CONDITION_BOUND:
            return False
        _, residual = _subset_solve(rows, subset)
        if residual >= RESIDUAL_TOL:
            return False
    return True


def build_cluster_code(
    ell: int,
    r: int,
    seed: int,
    cluster: int = 0,
    batch_offset: int = 0,
) -> ClusterCode:
    """Construct and verify the code for one cluster.

    Deterministic per ``(ell, r, seed, cluster)``.  Raises
    CodeConstructionError if no verified code is found within the retry
    budget (does not happen for the desk-scale shapes this targets).
    """
    if not 1 <= r <= ell:
        raise ConfigurationError(f"computation load r={r} must satisfy 1 <= r <= ell={ell}")
    for attempt in range(MAX_BUILD_ATTEMPTS):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(cluster, attempt))
        )
        rows = _candidate_rows(ell, r, rng)
        if rows is None or not _verify_rows(rows, ell, r):
            continue
        codewords = []
        for slot in range(ell):
            window = _cyclic_window(slot, ell, r)
            codewords.append(
                CodewordSpec(
                    cluster=cluster,
                    slot=slot,
                    support=tuple(batch_offset + j for j in window),
                    coeffs=tuple(float(rows[slot, j]) for j in window),
                )
            )
        return ClusterCode(
            ell=ell,
            r=r,
            cluster=cluster,
            batch_offset=batch_offset,
            codewords=tuple(codewords),
            coefficient_rows=rows,
        )
    raise CodeConstructionError(
        f"no verifiable code for ell={ell}, r={r} after {MAX_BUILD_ATTEMPTS} attempts"
    )


def solve_decoding(code: ClusterCode, received: Sequence[int]) -> np.ndarray:
    """Decode weights ``a`` with ``sum_i a_i c_i = (1/ell) sum_j g_j``.

    ``received`` lists the slot indices whose codewords arrived; the returned
    weights align with that order.  Uses a least-squares solve, which is the
    least-norm solution when more than the threshold number of codewords came
    in.
    """
    slots = list(received)
    if len(set(slots)) != len(slots):
        raise ConfigurationError("received slots contain duplicates")
    if any(not 0 <= s < code.ell for s in slots):
        raise ConfigurationError("received slot index out of range")
    if len(slots) < code.decoding_threshold:
        raise NotEnoughResultsError(
            f"cluster {code.cluster}: got {len(slots)} codewords, "
            f"need at least {code.decoding_threshold}"
        )
    weights, residual = _subset_solve(code.coefficient_rows, slots)
    if residual >= RESIDUAL_TOL:
        raise DecodeFailureError(
            f"cluster {code.cluster}: decode residual {residual:.3e} exceeds tolerance"
        )
    return weights


def encode(code: ClusterCode, slot: int, partials: Sequence[np.ndarray]) -> np.ndarray:
    """Combine a slot's ``r`` partial gradients into its codeword.

    ``partials`` must be ordered to match the slot's support.
    """
    spec = code.codewords[slot]
    if len(partials) != len(spec.coeffs):
        raise ValueError(
            f"slot {slot} expects {len(spec.coeffs)} partial gradients, got {len(partials)}"
        )
    arrays = [np.asarray(p, dtype=float) for p in partials]
    shape = arrays[0].shape
    if any(a.shape != shape for a in arrays):
        raise ValueError("partial gradients disagree in shape")
    out = np.zeros(shape)
    for weight, grad in zip(spec.coeffs, arrays):
        out += weight * grad
    return out


def decode_cluster_average(
    code: ClusterCode, received: Mapping[int, np.ndarray]
) -> np.ndarray:
    """Recover ``(1/ell) sum_j g_j`` for one cluster from received codewords."""
    slots = sorted(received)
    weights = solve_decoding(code, slots)
    out = None
    for weight, slot in zip(weights, slots):
        term = weight * np.asarray(received[slot], dtype=float)
        out = term if out is None else out + term
    return out


def decode_full_gradient(
    codes: Sequence[ClusterCode],
    received: Sequence[Mapping[int, np.ndarray]],
) -> np.ndarray:
    """Recover the average of all batch gradients from per-cluster codewords.

    ``received[p]`` maps slot index -> codeword vector for cluster ``p``.
    Raises NotDecodableError naming every cluster below its threshold.
    """
    if len(codes) != len(received):
        raise ConfigurationError("one received map per cluster is required")
    deficient = [
        code.cluster
        for code, got in zip(codes, received)
        if len(got) < code.decoding_threshold
    ]
    if deficient:
        raise NotDecodableError(deficient)
    total = None
    for code, got in zip(codes, received):
        avg = decode_cluster_average(code, got)
        total = avg if total is None else total + avg
    return total / len(codes)


def batch_average(partials: Iterable[np.ndarray]) -> np.ndarray:
    """Direct average of batch gradients; the oracle decode should match."""
    arrays = [np.asarray(p, dtype=float) for p in partials]
    return np.mean(arrays, axis=0)
