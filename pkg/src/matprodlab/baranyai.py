"""Constructive partition of the k-subsets of [N] into parallel classes.

For k dividing N, the C(N, k) subsets split into C(N-1, k-1) classes, each a
partition of [N] into N/k disjoint blocks.  The constructor adds ground
elements one at a time: when element a arrives, every class must absorb it
into exactly one of its partial blocks, and the number of blocks with current
content S that absorb a must equal the number of k-subsets containing S and a
that are still unfinished.  That assignment always exists as an integral
maximum flow in a small bipartite network (classes -> block contents), which
is how it is computed here.  `verify_family` re-checks the result by brute
force, independently of the construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .linalg import as_matrix, mat_pow

SIZE_CAP = 10**6


@dataclass(frozen=True)
class PartitionFamily:
    """Parallel classes of k-subsets of {1, ..., N}; blocks are sorted tuples."""

    N: int
    k: int
    classes: tuple


class _Dinic:
    """Integral max flow; nodes are 0..size-1."""

    def __init__(self, size: int):
        self.size = size
        self.head = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        idx = len(self.to)
        self.head[u].append(idx)
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(idx + 1)
        self.to.append(u)
        self.cap.append(0)
        return idx

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * self.size
        self.level[s] = 0
        queue = [s]
        for u in queue:
            for idx in self.head[u]:
                v = self.to[idx]
                if self.cap[idx] > 0 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    queue.append(v)
        return self.level[t] >= 0

    def _dfs(self, u: int, t: int, f: int) -> int:
        if u == t:
            return f
        while self.it[u] < len(self.head[u]):
            idx = self.head[u][self.it[u]]
            v = self.to[idx]
            if self.cap[idx] > 0 and self.level[v] == self.level[u] + 1:
                pushed = self._dfs(v, t, min(f, self.cap[idx]))
                if pushed:
                    self.cap[idx] -= pushed
                    self.cap[idx ^ 1] += pushed
                    return pushed
            self.it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while self._bfs(s, t):
            self.it = [0] * self.size
            while True:
                pushed = self._dfs(s, t, 1 << 60)
                if not pushed:
                    break
                flow += pushed
        return flow


def build_partitions(N: int, k: int) -> PartitionFamily:
    """Parallel classes covering every k-subset of [N] exactly once."""
    if N < 1 or k < 1:
        raise ValueError("N and k must be positive integers")
    if N % k != 0:
        raise ValueError(f"k = {k} does not divide N = {N}")
    if comb(N, k) > SIZE_CAP:
        raise ValueError(f"C({N}, {k}) exceeds the construction cap {SIZE_CAP}")
    n_classes = comb(N - 1, k - 1)
    blocks_per_class = N // k
    classes = [[[] for _ in range(blocks_per_class)] for _ in range(n_classes)]

    for elem in range(1, N + 1):
        filled = elem - 1  # elements already placed
        # block contents present per class, as sorted tuples; () marks empty
        class_types: list[list[tuple]] = []
        demand: dict[tuple, int] = {}
        for blocks in classes:
            types = []
            seen = set()
            for blk in blocks:
                if len(blk) >= k:
                    continue  # finished block, cannot absorb
                key = tuple(blk)
                if key not in seen:
                    seen.add(key)
                    types.append(key)
            class_types.append(types)
            for key in types:
                if key not in demand:
                    # unfinished k-subsets containing this content and elem
                    demand[key] = comb(N - filled - 1, k - len(key) - 1)
        type_ids = {key: i for i, key in enumerate(demand)}
        source = 0
        sink = 1 + n_classes + len(type_ids)
        net = _Dinic(sink + 1)
        class_edges: list[list[tuple[int, tuple]]] = []
        for r, types in enumerate(class_types):
            net.add_edge(source, 1 + r, 1)
            edges = []
            for key in types:
                idx = net.add_edge(1 + r, 1 + n_classes + type_ids[key], 1)
                edges.append((idx, key))
            class_edges.append(edges)
        for key, dem in demand.items():
            net.add_edge(1 + n_classes + type_ids[key], sink, dem)
        flow = net.max_flow(source, sink)
        if flow != n_classes:
            raise RuntimeError(
                f"internal error: flow {flow} != {n_classes} while placing {elem}"
            )
        for r, edges in enumerate(class_edges):
            chosen = None
            for idx, key in edges:
                if net.cap[idx] == 0:  # saturated forward edge
                    chosen = key
                    break
            if chosen is None:
                raise RuntimeError(f"internal error: class {r} absorbed nothing")
            for blk in classes[r]:
                if tuple(blk) == chosen:
                    blk.append(elem)
                    break

    canonical = tuple(
        tuple(sorted(tuple(blk) for blk in blocks)) for blocks in classes
    )
    return PartitionFamily(N=N, k=k, classes=tuple(sorted(canonical)))


def verify_family(f: PartitionFamily) -> bool:
    """Brute-force check of every family invariant, via bitset covers."""
    N, k = f.N, f.k
    if N < 1 or k < 1 or N % k != 0:
        return False
    if len(f.classes) != comb(N - 1, k - 1):
        return False
    full = (1 << N) - 1
    all_masks = []
    for blocks in f.classes:
        if len(blocks) != N // k:
            return False
        union = 0
        for blk in blocks:
            if len(blk) != k or len(set(blk)) != k:
                return False
            if any(not 1 <= j <= N for j in blk):
                return False
            mask = 0
            for j in blk:
                mask |= 1 << (j - 1)
            if union & mask:
                return False  # overlap within a class
            union |= mask
            all_masks.append(mask)
        if union != full:
            return False  # class does not cover the ground set
    expected = sorted(
        sum(1 << (j - 1) for j in blk) for blk in combinations(range(1, N + 1), k)
    )
    return sorted(all_masks) == expected


def peel_count(n: int, k: int) -> int:
    """The unique p in {0, ..., k-1} with k dividing n - p."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive integers")
    return n % k


def grouped_sums(
    f: PartitionFamily, xs, x_mean, n: int
) -> list[np.ndarray]:
    """Per-class sums of centered block products.

    For class r this is the sum over blocks {j1 < ... < jk} of
    n^{-k} (X_{jk} @ ... @ X_{j1} - x_mean^k); block indices are 1-based into
    xs.  Within a class the blocks are disjoint, so for independent draws the
    summands are independent.
    """
    if n < f.N:
        raise ValueError(f"normalization n = {n} must be at least N = {f.N}")
    if len(xs) < f.N:
        raise ValueError(f"need at least {f.N} matrices, got {len(xs)}")
    mats = [as_matrix(x, square=True) for x in xs[: f.N]]
    d = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != d:
            raise ValueError("matrix dimensions differ")
    x_mean = as_matrix(x_mean, square=True)
    if x_mean.shape[0] != d:
        raise ValueError("mean dimension differs from draws")
    center = mat_pow(x_mean, f.k)
    scale = 1.0 / float(n) ** f.k
    out = []
    for blocks in f.classes:
        total = np.zeros((d, d))
        for blk in blocks:
            prod = mats[blk[0] - 1]
            for j in blk[1:]:
                prod = mats[j - 1] @ prod  # larger index multiplies on the left
            total += prod - center
        out.append(scale * total)
    return out
