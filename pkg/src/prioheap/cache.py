"""Caches over the simulated heap.

Sache: a space-aware cache whose values live behind priority references; the
collector measures entries in bytes and evicts the low-priority tail when
the space bound is hit. BaselineCache: a conventional count/weight-bounded
LRU cache holding strong (rooted) values, evicting eagerly on insert.
"""

from __future__ import annotations

from collections import OrderedDict

from .collector import Collector
from .errors import DanglingReferent
from .heap import Heap, reachable_from
from .refs import Bound, PrioSpace


class LruPolicy:
    """Strictly increasing priorities: the most recent touch ranks highest.

    Share one instance (and one space) between caches to emulate a global
    soft-reference LRU clearing policy.
    """

    name = "lru"

    def __init__(self):
        self.highest_priority = 0

    def priority(self, entry) -> int:
        self.highest_priority += 1
        return self.highest_priority

    def note_evictions(self, entries) -> None:
        pass


class GreedyDualPolicy:
    """Cost-over-size priorities with an aging floor.

    H = aging + miss_cost / size; priorities are fixed-point (H * scale).
    After a collection, aging rises to the largest H among the evicted
    entries, so older savings deflate relative to new ones.
    """

    name = "greedydual"

    def __init__(self, scale: int = 1 << 16):
        self.scale = scale
        self.aging = 0.0

    def priority(self, entry) -> int:
        entry.h_value = self.aging + entry.cost / max(1, entry.size_estimate)
        return round(self.scale * entry.h_value)

    def note_evictions(self, entries) -> None:
        values = [e.h_value for e in entries if e.h_value is not None]
        if values:
            self.aging = max(self.aging, max(values))


class _Entry:
    __slots__ = ("ref", "cost", "size_estimate", "h_value")

    def __init__(self, cost: int, size_estimate: int):
        self.ref = None
        self.cost = cost
        self.size_estimate = size_estimate
        self.h_value = None


class Sache:
    """Key-value cache measured and trimmed by the garbage collector.

    Entries are discovered to be evicted lazily: the first access after a
    collection scans for references the collector cleared.
    """

    def __init__(self, heap: Heap, collector: Collector, bound: Bound | None = None,
                 policy=None, eviction_mode: str = "strict",
                 space: PrioSpace | None = None, name: str | None = None):
        if space is None:
            if bound is None:
                raise ValueError("either a bound or an existing space is required")
            space = collector.new_space(bound, eviction_mode, name)
        self._heap = heap
        self._collector = collector
        self.space = space
        self.policy = policy if policy is not None else LruPolicy()
        self._map: dict = {}
        self._epoch = heap.gc_epoch
        self.last_evicted_keys: list = []

    def __len__(self) -> int:
        self._maybe_update()
        return len(self._map)

    def __contains__(self, key) -> bool:
        self._maybe_update()
        entry = self._map.get(key)
        return entry is not None and entry.ref.get() is not None

    def keys(self):
        self._maybe_update()
        return list(self._map)

    def get(self, key):
        """Value root for the key, re-prioritized per policy; None on a miss."""
        self._maybe_update()
        entry = self._map.get(key)
        if entry is None:
            return None
        root = entry.ref.get()
        if root is None:
            del self._map[key]
            if not entry.ref.removed:
                self.space.remove_ref(entry.ref)
            return None
        entry.ref.set_priority(self.policy.priority(entry))
        return root

    def put(self, key, value_root: int, miss_cost: int = 0) -> None:
        """Insert at top priority; replaces any previous mapping for the key."""
        self._maybe_update()
        if not self._heap.is_alive(value_root):
            raise DanglingReferent(f"object {value_root} is not alive")
        old = self._map.get(key)
        if old is not None:
            if old.ref.get() == value_root:
                old.cost = miss_cost
                old.ref.set_priority(self.policy.priority(old))
                return
            if not old.ref.removed:
                self.space.remove_ref(old.ref)
            del self._map[key]
        entry = _Entry(miss_cost, self._heap.requested_of(value_root))
        entry.ref = self.space.new_ref(value_root, self.policy.priority(entry))
        self._map[key] = entry

    def remove(self, key):
        """Drop the mapping; the value's liveness is decided at the next GC."""
        self._maybe_update()
        entry = self._map.pop(key, None)
        if entry is None:
            return None
        root = entry.ref.get()
        if not entry.ref.removed:
            self.space.remove_ref(entry.ref)
        return root

    def update(self) -> int:
        """Drop entries the collector evicted; returns how many were dropped."""
        evicted = [(key, e) for key, e in self._map.items() if e.ref.get() is None]
        for key, entry in evicted:
            del self._map[key]
            if not entry.ref.removed:
                self.space.remove_ref(entry.ref)
        self.last_evicted_keys = [key for key, _ in evicted]
        self.policy.note_evictions([entry for _, entry in evicted])
        for entry in self._map.values():
            measured = entry.ref.gcsize
            if measured > 0:
                entry.size_estimate = measured
        self._epoch = self._heap.gc_epoch
        return len(evicted)

    def _maybe_update(self) -> None:
        if self._heap.gc_epoch != self._epoch:
            self.update()


def softref_emulation(collector: Collector, free_fraction: float = 0.5,
                      eviction_mode: str = "strict"):
    """Shared (space, policy) pair modeling a runtime-wide soft-reference LRU.

    Build every cache on the returned pair: priorities become global
    last-access timestamps and one free-fraction bound governs them all.
    """
    space = collector.new_space(Bound.fraction_of_free(free_fraction),
                                eviction_mode, name="softref")
    return space, LruPolicy()


def node_count_weigher(heap: Heap, root: int) -> int:
    """Default baseline weigher: vertices of the value structure."""
    return len(reachable_from(heap, {root}))


class BaselineCache:
    """Conventional LRU cache: strong values, eager eviction on insert.

    Capacity is a maximum entry count or a maximum total weight (exactly
    one). Evicted values are only unrooted; their memory returns at the
    next collection, as in any garbage-collected runtime.
    """

    def __init__(self, heap: Heap, max_entries: int | None = None,
                 max_weight: int | None = None, weigher=None):
        if (max_entries is None) == (max_weight is None):
            raise ValueError("specify exactly one of max_entries or max_weight")
        self._heap = heap
        self.max_entries = max_entries
        self.max_weight = max_weight
        self.weigher = weigher if weigher is not None else node_count_weigher
        self._entries: OrderedDict = OrderedDict()  # key -> (root, weight), LRU first
        self.total_weight = 0
        self.last_evicted_keys: list = []

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key):
        item = self._entries.get(key)
        if item is None:
            return None
        self._entries.move_to_end(key)
        return item[0]

    def put(self, key, value_root: int, miss_cost: int = 0) -> None:
        # miss_cost is accepted for driver-interface parity and ignored
        if not self._heap.is_alive(value_root):
            raise DanglingReferent(f"object {value_root} is not alive")
        old = self._entries.pop(key, None)
        if old is not None:
            self.total_weight -= old[1]
            if old[0] != value_root:
                self._heap.remove_root(old[0])
        weight = self.weigher(self._heap, value_root)
        self._heap.add_root(value_root)
        self._entries[key] = (value_root, weight)
        self.total_weight += weight
        self.last_evicted_keys = []
        while self._over_capacity():
            evicted_key, (root, w) = self._entries.popitem(last=False)
            self._heap.remove_root(root)
            self.total_weight -= w
            self.last_evicted_keys.append(evicted_key)

    def remove(self, key):
        item = self._entries.pop(key, None)
        if item is None:
            return None
        self._heap.remove_root(item[0])
        self.total_weight -= item[1]
        return item[0]

    def _over_capacity(self) -> bool:
        if self.max_entries is not None:
            return len(self._entries) > self.max_entries
        return self.total_weight > self.max_weight
