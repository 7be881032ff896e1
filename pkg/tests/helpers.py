"""Shared test oracles and random-graph builders.

Everything here recomputes expected collector outcomes from first principles
(set algebra over reachable_from, or a second traversal implementation) and
never touches the mark kernels it is used to check.
"""

from __future__ import annotations

import random
import sys

from prioheap import Heap, reachable_from


def dfs_reachable(heap: Heap, starts, barriers=()) -> set[int]:
    """Recursive depth-first reachability; independent of reachable_from."""
    barrier_set = set(barriers)
    start_set = set(starts)
    seen: set[int] = set()
    limit = sys.getrecursionlimit()
    if len(heap) + 50 > limit:
        sys.setrecursionlimit(len(heap) + 50)

    def visit(obj: int) -> None:
        if obj in seen:
            return
        seen.add(obj)
        if obj in barrier_set and obj not in start_set:
            return
        for target in heap.slots_of(obj):
            if target is not None:
                visit(target)

    for s in start_set:
        visit(s)
    return seen


def total_bytes(heap: Heap, objs) -> int:
    return sum(heap.allocated_of(o) for o in objs)


def oracle_unbounded_sizes(heap: Heap, seeds_in_order):
    """Expected sizes for premarked seeds processed in order with no bound.

    Models the collection's charging rules purely with sets:
    - the root closure traverses roots (even premarked ones) and stops at
      other premarked objects, which it merely touches;
    - each seed's closure charges newly reached objects, plus the seed's own
      bytes unless the roots touched it;
    - anything already marked acts as a barrier.

    Returns (sizes list, expected surviving object set).
    """
    premarks = set(seeds_in_order)
    roots = set(heap.roots)
    root_reach = reachable_from(heap, roots, premarks)
    explored = set(root_reach) - (premarks - roots)
    marked = premarks | root_reach
    sizes = []
    for seed in seeds_in_order:
        if seed in explored:
            sizes.append(0)
            continue
        region = reachable_from(heap, {seed}, marked - {seed})
        newly = region - marked
        size = total_bytes(heap, newly - {seed})
        if seed not in root_reach:
            size += heap.allocated_of(seed)
        marked |= newly
        explored |= newly | {seed}
        sizes.append(size)
    return sizes, marked


def oracle_union_footprint(heap: Heap, seeds) -> int:
    """Bytes of everything the seeds can reach that the roots cannot
    (root traversal stopping at premarked seeds)."""
    premarks = set(seeds)
    root_reach = reachable_from(heap, set(heap.roots), premarks)
    union = reachable_from(heap, premarks, frozenset())
    return total_bytes(heap, union - root_reach)


def build_random_heap(seed: int, n_objects: int = 200, max_slots: int = 3,
                      capacity: int = 1 << 40, root_fraction: float = 0.15,
                      edge_prob: float = 0.5):
    """Random object graph with random roots; returns (heap, rng)."""
    rng = random.Random(seed)
    heap = Heap(capacity)
    ids = []
    for _ in range(n_objects):
        requested = rng.randint(1, 400)
        slots = rng.randint(0, max_slots)
        ids.append(heap.alloc(requested, slots))
    for obj in ids:
        for index in range(heap.slot_count_of(obj)):
            if rng.random() < edge_prob:
                heap.set_slot(obj, index, rng.choice(ids))
    for obj in ids:
        if rng.random() < root_fraction:
            heap.add_root(obj)
    if not heap.roots and ids:
        heap.add_root(rng.choice(ids))
    return heap, rng


def chain(heap: Heap, n: int, requested: int = 64) -> list[int]:
    """Allocate a singly linked chain; returns ids head-first."""
    ids = [heap.alloc(requested, 1) for _ in range(n)]
    for a, b in zip(ids, ids[1:]):
        heap.set_slot(a, 0, b)
    return ids


class LruListSim:
    """Reference LRU simulation over keys: most-recent-first list plus a
    retained-prefix rule for entry-boundary eviction with uniform sizes."""

    def __init__(self, bound_bytes: int, entry_bytes: int):
        self.bound = bound_bytes
        self.entry_bytes = entry_bytes
        self.order: list = []  # most recent first

    def touch(self, key) -> bool:
        """Returns True on hit."""
        if key in self.order:
            self.order.remove(key)
            self.order.insert(0, key)
            return True
        return False

    def insert(self, key) -> None:
        if key in self.order:
            self.order.remove(key)
        self.order.insert(0, key)

    def collect(self) -> set:
        """Apply one collection: the crossing entry completes, the rest go."""
        keep = self.bound // self.entry_bytes + 1
        evicted = set(self.order[keep:])
        self.order = self.order[:keep]
        return evicted
