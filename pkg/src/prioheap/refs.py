"""Application-facing reference API: priority references grouped into spaces.

A PrioReference holds one heap object with an application-chosen integer
priority; a PrioSpace groups references under a shared byte bound and
eviction mode. The collector enforces the bound by marking references in
(priority desc, creation asc) order and letting everything unmarked die.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import DanglingReferent, InvalidBound, NotFound

EVICT_STRICT = "strict"
EVICT_ENTRY_BOUNDARY = "entry-boundary"

_BOUND_MODES = ("fixed", "fraction_heap", "fraction_free", "adaptive_reserve")


@dataclass(frozen=True)
class Bound:
    """Space bound: fixed bytes, a heap/free fraction, or an adaptive reserve."""

    mode: str
    value: float

    def __post_init__(self):
        if self.mode not in _BOUND_MODES:
            raise InvalidBound(f"unknown bound mode {self.mode!r}")
        if self.mode in ("fixed", "adaptive_reserve"):
            if self.value < 0 or self.value != int(self.value):
                raise InvalidBound(f"{self.mode} bound must be a non-negative byte count")
        else:
            if not 0.0 <= self.value <= 1.0:
                raise InvalidBound(f"{self.mode} bound must be a fraction in [0, 1]")

    @classmethod
    def fixed(cls, nbytes: int) -> Bound:
        return cls("fixed", nbytes)

    @classmethod
    def fraction_of_heap(cls, fraction: float) -> Bound:
        return cls("fraction_heap", fraction)

    @classmethod
    def fraction_of_free(cls, fraction: float) -> Bound:
        return cls("fraction_free", fraction)

    @classmethod
    def adaptive_reserve(cls, reserve_bytes: int) -> Bound:
        return cls("adaptive_reserve", reserve_bytes)

    def resolve(self, capacity_bytes: int, non_space_live_bytes: int) -> int:
        """Concrete byte bound for this collection; adaptive modes use the
        non-space live size measured by the root closure."""
        if self.mode == "fixed":
            return int(self.value)
        if self.mode == "fraction_heap":
            return int(self.value * capacity_bytes)
        if self.mode == "fraction_free":
            return int(self.value * (capacity_bytes - non_space_live_bytes))
        reserved = non_space_live_bytes + int(self.value)
        return max(0, capacity_bytes - reserved)

    def label(self) -> str:
        if self.mode in ("fixed", "adaptive_reserve"):
            return f"{self.mode}:{int(self.value)}"
        return f"{self.mode}:{self.value:g}"


class PrioReference:
    """Clearable reference with a mutable priority, owned by one space."""

    __slots__ = ("space", "creation_seq", "_referent", "_priority",
                 "gcsize", "fresh", "abandoned", "removed")

    def __init__(self, space: PrioSpace, referent: int, priority: int, creation_seq: int):
        self.space = space
        self.creation_seq = creation_seq
        self._referent = referent
        self._priority = priority
        self.gcsize = 0
        self.fresh = False
        self.abandoned = False
        self.removed = False

    def get(self) -> int | None:
        """The referent object id, or None once evicted or removed."""
        ref = self._referent
        if ref is None or not self.space._heap.is_alive(ref):
            return None
        return ref

    def get_priority(self) -> int:
        return self._priority

    def set_priority(self, priority: int) -> None:
        if self.removed:
            raise NotFound("reference was removed from its space")
        if priority == self._priority:
            return
        self._priority = priority
        self.space._order.reinsert(self)

    def has_gc_size(self) -> bool:
        return self.fresh

    def get_gc_size(self) -> int:
        """Last computed dominating size; reading resets the freshness flag."""
        self.fresh = False
        return self.gcsize

    def _order_key(self) -> tuple[int, int]:
        return (-self._priority, self.creation_seq)


class _LazyOrder:
    """Heap of (key, ref) entries with lazy invalidation.

    Reprioritizing pushes a fresh entry in O(log N); stale entries are
    dropped when encountered. The key (-priority, creation_seq) is a total
    order, so iteration is deterministic.
    """

    def __init__(self):
        self._entries: list[tuple[tuple[int, int], PrioReference]] = []
        self._live = 0

    def add(self, ref: PrioReference) -> None:
        heapq.heappush(self._entries, (ref._order_key(), ref))
        self._live += 1

    def reinsert(self, ref: PrioReference) -> None:
        heapq.heappush(self._entries, (ref._order_key(), ref))
        if len(self._entries) > 64 and len(self._entries) > 3 * self._live:
            self._compact()

    def discard(self, ref: PrioReference) -> None:
        # entry stays in the heap; filtered out by the `removed` flag
        self._live -= 1

    def __len__(self) -> int:
        return self._live

    def _compact(self) -> None:
        seen: set[int] = set()
        fresh: list[tuple[tuple[int, int], PrioReference]] = []
        for key, ref in self._entries:
            if ref.removed or key != ref._order_key() or id(ref) in seen:
                continue
            seen.add(id(ref))
            fresh.append((key, ref))
        heapq.heapify(fresh)
        self._entries = fresh

    def ordered(self) -> list[PrioReference]:
        """Snapshot in (priority desc, creation asc) order; compacts the heap."""
        out: list[PrioReference] = []
        seen: set[int] = set()
        entries = self._entries
        result: list[tuple[tuple[int, int], PrioReference]] = []
        while entries:
            key, ref = heapq.heappop(entries)
            if ref.removed or key != ref._order_key() or id(ref) in seen:
                continue
            seen.add(id(ref))
            out.append(ref)
            result.append((key, ref))
        # out is already sorted; reuse it as the new heap
        self._entries = result
        self._live = len(result)
        return out


class PrioSpace:
    """A group of priority references sharing one bound and eviction mode."""

    def __init__(self, heap, bound: Bound, eviction_mode: str = EVICT_STRICT,
                 name: str | None = None):
        if eviction_mode not in (EVICT_STRICT, EVICT_ENTRY_BOUNDARY):
            raise ValueError(f"unknown eviction mode {eviction_mode!r}")
        self._heap = heap
        self.bound = bound
        self.eviction_mode = eviction_mode
        self.name = name
        self.total_gcsize = 0
        self.fresh = False
        self._order = _LazyOrder()
        self._next_seq = 0

    def new_ref(self, obj: int, priority: int) -> PrioReference:
        if not self._heap.is_alive(obj):
            raise DanglingReferent(f"object {obj} is not alive")
        ref = PrioReference(self, obj, priority, self._next_seq)
        self._next_seq += 1
        self._order.add(ref)
        return ref

    def remove_ref(self, ref: PrioReference) -> None:
        """Detach a reference; the referent's liveness is decided at the next GC."""
        if ref.space is not self or ref.removed:
            raise NotFound("reference does not belong to this space")
        ref.removed = True
        ref._referent = None
        self._order.discard(ref)

    def ordered_refs(self) -> list[PrioReference]:
        """Live references in (priority desc, creation asc) order."""
        return self._order.ordered()

    def __len__(self) -> int:
        return len(self._order)

    def has_gc_size(self) -> bool:
        return self.fresh

    def get_gc_size(self) -> int:
        self.fresh = False
        return self.total_gcsize
