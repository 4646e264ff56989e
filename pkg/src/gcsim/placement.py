"""Greedy per-iteration cluster formation that balances stragglers.

Given the eligibility matrix and the most recent straggler observation, the
scheduler re-forms the ``P`` clusters for the next iteration:

Phase 1 places the larger of the two groups (non-stragglers vs stragglers)
first, breaking a tie toward non-stragglers.  For each group the clusters
are ordered by how few eligible group members they have (scarcest first;
ties by cluster index) and then take turns in that order, each turn claiming
the lowest-indexed unplaced eligible worker of the group.  Full clusters
drop out of the order; clusters with nothing to claim are skipped.

Phase 2 fixes placement conflicts (an unplaced worker ineligible for every
unfilled cluster) by swapping: first single swaps, then breadth-first swap
chains.  If a worker still cannot be placed, the iteration falls back to the
static clustering and the placement is flagged.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .assignment import ClusterAssignment


@dataclass(frozen=True)
class Placement:
    """One iteration's cluster formation and codeword slots."""

    members: tuple[tuple[int, ...], ...]  # P clusters of ell worker ids, sorted
    worker_codeword: dict[int, tuple[int, int]]  # worker -> (cluster, slot)
    fallback_used: bool

    @property
    def num_clusters(self) -> int:
        return len(self.members)

    def as_dict(self) -> dict:
        return {
            "fallback_used": self.fallback_used,
            "clusters": [
                {"cluster": p, "members": list(ms)} for p, ms in enumerate(self.members)
            ],
            "slots": {
                str(w): {"cluster": c, "slot": s}
                for w, (c, s) in sorted(self.worker_codeword.items())
            },
        }


def split_by_state(straggler_vector: Sequence[int]) -> tuple[list[int], list[int]]:
    """Worker ids split into (non-stragglers, stragglers)."""
    fast = [k for k, s in enumerate(straggler_vector) if s == 1]
    slow = [k for k, s in enumerate(straggler_vector) if s == 0]
    return fast, slow


def availability_order(
    assign: ClusterAssignment,
    group: Iterable[int],
    capacity: Sequence[int],
) -> list[int]:
    """Clusters with remaining capacity, scarcest eligible group members first.

    Ties break toward the lower cluster index; zero-capacity clusters are
    omitted.
    """
    members = set(group)
    ranked = sorted(
        (len(assign.columns[p] & members), p)
        for p in range(assign.num_clusters)
        if capacity[p] > 0
    )
    return [p for _, p in ranked]


def _place_group(
    assign: ClusterAssignment,
    members: list[list[int]],
    group: list[int],
) -> list[int]:
    """Run the turn-taking placement for one group; returns unplaced workers."""
    ell = assign.ell
    capacity = [ell - len(members[p]) for p in range(assign.num_clusters)]
    order = availability_order(assign, group, capacity)
    pending = set(group)
    while pending and order:
        progress = False
        surviving = []
        for p in order:
            if len(members[p]) >= ell:
                continue
            eligible = assign.columns[p] & pending
            if eligible:
                worker = min(eligible)
                members[p].append(worker)
                pending.discard(worker)
                progress = True
            if len(members[p]) < ell:
                surviving.append(p)
        order = surviving
        if not progress:
            break
    return sorted(pending)


def _try_single_swap(
    assign: ClusterAssignment, members: list[list[int]], worker: int
) -> bool:
    """Swap ``worker`` into a donor cluster whose member fills an open slot."""
    ell = assign.ell
    for target in range(assign.num_clusters):
        if len(members[target]) >= ell:
            continue
        for donor in range(assign.num_clusters):
            if donor == target or worker not in assign.columns[donor]:
                continue
            movable = [w for w in members[donor] if w in assign.columns[target]]
            if movable:
                moved = min(movable)
                members[donor].remove(moved)
                members[donor].append(worker)
                members[target].append(moved)
                return True
    return False


def _try_swap_chain(
    assign: ClusterAssignment, members: list[list[int]], worker: int
) -> bool:
    """Breadth-first search for a displacement chain ending at an open slot.

    The chain moves ``worker`` into its first cluster, whose recorded member
    moves to the next cluster, and so on until a cluster with spare capacity
    absorbs the final displaced worker.  Depth is capped at K.
    """
    ell = assign.ell
    starts = [
        p
        for p in range(assign.num_clusters)
        if worker in assign.columns[p] and len(members[p]) >= ell
    ]
    # parent[p] = (previous cluster, member moved from previous into p)
    parent: dict[int, tuple[int | None, int | None]] = {}
    queue: deque[tuple[int, int]] = deque()
    for p in starts:
        parent[p] = (None, None)
        queue.append((p, 0))
    while queue:
        current, depth = queue.popleft()
        if depth >= assign.num_workers:
            continue
        for nxt in range(assign.num_clusters):
            if nxt in parent or nxt == current:
                continue
            movable = [w for w in members[current] if w in assign.columns[nxt]]
            if not movable:
                continue
            parent[nxt] = (current, min(movable))
            if len(members[nxt]) < ell:
                # Unwind the chain: each recorded member hops one cluster on.
                chain = []
                node = nxt
                while True:
                    prev, moved = parent[node]
                    if prev is None:
                        break
                    chain.append((prev, node, moved))
                    node = prev
                for src, dst, moved in chain:
                    members[src].remove(moved)
                    members[dst].append(moved)
                members[node].append(worker)
                return True
            queue.append((nxt, depth + 1))
    return False


def greedy_place(
    assign: ClusterAssignment, straggler_vector: Sequence[int]
) -> Placement:
    """Form this iteration's clusters from the observed straggler vector.

    Always returns a valid placement; if the swap phase cannot resolve a
    conflict the static clustering is used and ``fallback_used`` is set.
    """
    fast, slow = split_by_state(straggler_vector)
    groups = [fast, slow] if len(fast) >= len(slow) else [slow, fast]
    members: list[list[int]] = [[] for _ in range(assign.num_clusters)]
    unplaced: list[int] = []
    for group in groups:
        if group:
            unplaced.extend(_place_group(assign, members, group))

    fallback = False
    for worker in unplaced:
        if _try_single_swap(assign, members, worker):
            continue
        if _try_swap_chain(assign, members, worker):
            continue
        fallback = True
        break
    if fallback:
        members = [list(col) for col in assign.static.columns]

    ordered = tuple(tuple(sorted(ms)) for ms in members)
    worker_codeword = {
        w: (p, slot) for p, ms in enumerate(ordered) for slot, w in enumerate(ms)
    }
    return Placement(
        members=ordered, worker_codeword=worker_codeword, fallback_used=fallback
    )


def static_placement(assign: ClusterAssignment) -> Placement:
    """The fixed base-block clustering, as used by the static scheme."""
    ordered = tuple(tuple(sorted(col)) for col in assign.static.columns)
    worker_codeword = {
        w: (p, slot) for p, ms in enumerate(ordered) for slot, w in enumerate(ms)
    }
    return Placement(members=ordered, worker_codeword=worker_codeword, fallback_used=False)


def validate_placement(assign: ClusterAssignment, placement: Placement) -> None:
    """Raise AssertionError unless the placement is a valid eligible partition."""
    seen: set[int] = set()
    for p, ms in enumerate(placement.members):
        assert len(ms) == assign.ell, f"cluster {p} has {len(ms)} members"
        for w in ms:
            assert w not in seen, f"worker {w} placed twice"
            seen.add(w)
            assert w in assign.columns[p], f"worker {w} not eligible for cluster {p}"
    assert seen == set(range(assign.num_workers)), "placement does not cover all workers"
    slots = sorted(placement.worker_codeword.values())
    expected = sorted((p, s) for p in range(assign.num_clusters) for s in range(assign.ell))
    assert slots == expected, "slot assignment is not a bijection"


def full_recovery_possible(
    placement: Placement, straggler_vector: Sequence[int], r: int
) -> bool:
    """True iff every cluster keeps at least ``ell - r + 1`` non-stragglers."""
    s = np.asarray(straggler_vector)
    ell = len(placement.members[0])
    threshold = ell - r + 1
    return all(int(s[list(ms)].sum()) >= threshold for ms in placement.members)


def straggler_spread(
    placement: Placement, straggler_vector: Sequence[int]
) -> tuple[int, ...]:
    """Per-cluster straggler counts; sums to the total number of stragglers."""
    s = np.asarray(straggler_vector)
    return tuple(int(len(ms) - s[list(ms)].sum()) for ms in placement.members)


class _MaxFlow:
    """Tiny BFS/DFS max-flow for the exact min-max straggler oracle."""

    def __init__(self, n: int):
        self.n = n
        self.graph: list[list[list[int]]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, cap: int) -> None:
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])

    def max_flow(self, source: int, sink: int) -> int:
        flow = 0
        while True:
            parent = [None] * self.n
            parent[source] = (source, -1)
            queue = deque([source])
            while queue and parent[sink] is None:
                u = queue.popleft()
                for idx, (v, cap, _) in enumerate(self.graph[u]):
                    if cap > 0 and parent[v] is None:
                        parent[v] = (u, idx)
                        queue.append(v)
            if parent[sink] is None:
                return flow
            # Unit capacities from the source side: augment one unit.
            v = sink
            while v != source:
                u, idx = parent[v]
                self.graph[u][idx][1] -= 1
                rev = self.graph[u][idx][2]
                self.graph[v][rev][1] += 1
                v = u
            flow += 1


def _placement_feasible(
    assign: ClusterAssignment, stragglers: set[int], budget: int
) -> bool:
    """Can every worker be placed with at most ``budget`` stragglers per cluster?"""
    K, P, ell = assign.num_workers, assign.num_clusters, assign.ell
    # Nodes: source, K workers, P straggler gates, P clusters, sink.
    source = 0
    worker0 = 1
    gate0 = worker0 + K
    cluster0 = gate0 + P
    sink = cluster0 + P
    net = _MaxFlow(sink + 1)
    for k in range(K):
        net.add_edge(source, worker0 + k, 1)
    for p in range(P):
        net.add_edge(gate0 + p, cluster0 + p, budget)
        net.add_edge(cluster0 + p, sink, ell)
    for k in range(K):
        for p in assign.worker_clusters[k]:
            target = gate0 + p if k in stragglers else cluster0 + p
            net.add_edge(worker0 + k, target, 1)
    return net.max_flow(source, sink) == K


def min_max_straggler_load(
    assign: ClusterAssignment, straggler_vector: Sequence[int]
) -> int:
    """Exact minimum over valid placements of the max per-cluster straggler count.

    Independent oracle for judging the greedy heuristic: binary-search-free
    scan over budgets starting at the pigeonhole floor, each tested with a
    max-flow feasibility check.
    """
    stragglers = {k for k, s in enumerate(straggler_vector) if s == 0}
    floor = -(-len(stragglers) // assign.num_clusters) if stragglers else 0
    for budget in range(floor, assign.ell + 1):
        if _placement_feasible(assign, stragglers, budget):
            return budget
    raise AssertionError("placement must be feasible with budget = ell")
