"""Self-contained property suites behind the ``verify`` CLI command.

Each check re-states one of the toolkit's core guarantees and reports
PASS/FAIL with a one-line detail.  The acceptance tests make the same
claims with independent oracles; this module exists so a packaged install
can be smoke-checked without pytest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import latency, placement
from .assignment import build_cluster_assignment, build_static_clusters
from .codes import build_cluster_code, solve_decoding
from .latency import LatencyParams, completion_cdf
from .simulator import completion_time_clustered, completion_time_gc, completion_time_lb


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_decode_exactness() -> CheckResult:
    worst = 0.0
    for ell, r in ((3, 2), (4, 3), (5, 3), (2, 2)):
        code = build_cluster_code(ell, r, seed=7)
        for subset in itertools.combinations(range(ell), ell - r + 1):
            weights = solve_decoding(code, list(subset))
            system = code.coefficient_rows[list(subset)].T
            worst = max(
                worst,
                float(np.linalg.norm(system @ weights - np.full(ell, 1.0 / ell))),
            )
    return CheckResult(
        "decode-exactness", worst < 1e-9, f"max subset residual {worst:.2e}"
    )


def check_sampler(samples: int = 100_000) -> CheckResult:
    params = LatencyParams(mu_slow=0.1, mu_fast=10.0, alpha=0.01, switch_prob=0.05)
    rng = np.random.default_rng(11)
    s = 3
    worst_ks, worst_mean = 0.0, 0.0
    for fast in (True, False):
        mu = params.rate(fast)
        draws = np.sort(
            latency.sample_completion_times(
                np.full(samples, fast), s, params, rng
            )
        )
        cdf = completion_cdf(draws, s, mu, params.alpha)
        grid = np.arange(1, samples + 1) / samples
        ks = float(np.max(np.maximum(np.abs(grid - cdf), np.abs(grid - 1 / samples - cdf))))
        mean_err = abs(draws.mean() - s * (params.alpha + 1 / mu)) / (
            s * (params.alpha + 1 / mu)
        )
        worst_ks = max(worst_ks, ks)
        worst_mean = max(worst_mean, mean_err)
    ok = worst_ks < 0.01 and worst_mean < 0.01
    return CheckResult(
        "latency-sampler", ok, f"KS {worst_ks:.4f}, mean error {worst_mean:.4%}"
    )


def check_placement_validity(instances: int = 2000, seed: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    gaps = []
    for shape_index, (K, P, n) in enumerate(((12, 4, 2), (20, 5, 3))):
        static = build_static_clusters(K, P)
        for i in range(instances):
            assign = build_cluster_assignment(static, n, seed=[seed, shape_index, i])
            s = (rng.random(K) < 0.5).astype(int)
            placed = placement.greedy_place(assign, s)
            placement.validate_placement(assign, placed)
            spread = placement.straggler_spread(placed, s)
            stragglers = int(K - s.sum())
            floor = -(-stragglers // P) if stragglers else 0
            if max(spread) < floor:
                return CheckResult(
                    "placement-validity", False, f"greedy beat the pigeonhole floor"
                )
            if K <= 12:
                gaps.append(max(spread) - placement.min_max_straggler_load(assign, s))
    detail = (
        f"{2 * instances} instances valid; K=12 optimality gap mean "
        f"{np.mean(gaps):.4f}, max {max(gaps)}"
    )
    return CheckResult("placement-validity", True, detail)


def check_recovery_dominance(instances: int = 2000, seed: int = 9) -> CheckResult:
    rng = np.random.default_rng(seed)
    static = build_static_clusters(12, 4)
    r = 2
    greedy_hits = static_hits = 0
    for i in range(instances):
        assign = build_cluster_assignment(static, 2, seed=[seed, i])
        s = (rng.random(12) < 0.5).astype(int)
        static_placed = placement.static_placement(assign)
        greedy_placed = placement.greedy_place(assign, s)
        static_hits += placement.full_recovery_possible(static_placed, s, r)
        greedy_hits += placement.full_recovery_possible(greedy_placed, s, r)
    ok = greedy_hits >= static_hits
    return CheckResult(
        "recovery-dominance",
        ok,
        f"greedy {greedy_hits}/{instances} vs static {static_hits}/{instances}",
    )


def check_lb_dominance(trials: int = 10_000, seed: int = 3) -> CheckResult:
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        P = int(rng.integers(1, 5))
        ell = int(rng.integers(1, 5))
        K = P * ell
        r = int(rng.integers(1, ell + 1))
        times = rng.exponential(size=K)
        perm = rng.permutation(K)
        members = [perm[p * ell : (p + 1) * ell].tolist() for p in range(P)]
        lb = completion_time_lb(times, P, ell, r)
        if lb > completion_time_clustered(times, members, r) + 1e-15:
            return CheckResult("lb-dominance", False, "LB exceeded a clustered time")
        if lb > completion_time_gc(times, r) + 1e-15:
            return CheckResult("lb-dominance", False, "LB exceeded the GC time")
    return CheckResult("lb-dominance", True, f"{trials} random instances")


def check_markov_symmetry(iterations: int = 10_000, seed: int = 13) -> CheckResult:
    rng = np.random.default_rng(seed)
    states = latency.initial_states(12, slow_count=2, slow_ids=None, rng=rng)
    slow_fraction = 0.0
    for _ in range(iterations):
        states = latency.step_states(states, 0.05, rng)
        slow_fraction += 1.0 - states.mean()
    slow_fraction /= iterations
    ok = abs(slow_fraction - 0.5) < 0.02
    return CheckResult("markov-symmetry", ok, f"long-run slow fraction {slow_fraction:.3f}")


def run_all(full: bool = False) -> list[CheckResult]:
    scale = 10_000 if full else 2000
    return [
        check_decode_exactness(),
        check_sampler(),
        check_placement_validity(instances=scale // 2),
        check_recovery_dominance(instances=scale // 2),
        check_lb_dominance(),
        check_markov_symmetry(),
    ]
