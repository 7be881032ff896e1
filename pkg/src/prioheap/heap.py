"""Simulated managed heap: object graph, size-class accounting, roots.

Objects are stored column-wise in flat arrays so the collector kernels can
run over them without touching Python objects. Object ids are dense ints,
never reused within a run; payload bytes are accounting numbers only.
"""

from __future__ import annotations

import bisect
from array import array
from dataclasses import dataclass
from typing import Iterable

from .errors import DanglingWrite, OutOfMemory

DEFAULT_LARGE_OBJECT_THRESHOLD = 8192

# Mark states used by the collector (stored per object in Heap._mark).
MARK_NONE = 0
MARK_PREMARK = 1          # premarked referent/query root, untouched by the root closure
MARK_PREMARK_TOUCHED = 2  # premarked and reached (but not traversed) from the roots
MARK_LIVE = 3

NO_REF = -1  # null slot value


def default_size_classes() -> tuple[int, ...]:
    """51 allocation denominations: 8-byte steps to 256, then ~1.2x growth to 8192."""
    classes = list(range(8, 257, 8))
    ratio = (8192 / 256) ** (1.0 / 19)
    value = 256.0
    for _ in range(19):
        value *= ratio
        rounded = int(round(value / 8.0)) * 8
        if rounded <= classes[-1]:
            rounded = classes[-1] + 8
        classes.append(rounded)
    classes[-1] = 8192
    return tuple(classes)


@dataclass(frozen=True)
class SizeClassTable:
    """Ascending allocation denominations; exact allocation above the threshold."""

    classes: tuple[int, ...] = default_size_classes()
    large_object_threshold: int = DEFAULT_LARGE_OBJECT_THRESHOLD

    def __post_init__(self):
        if not self.classes:
            raise ValueError("size class table must not be empty")
        if any(c <= 0 for c in self.classes):
            raise ValueError("size classes must be positive")
        if any(a >= b for a, b in zip(self.classes, self.classes[1:])):
            raise ValueError("size classes must be strictly ascending")
        if self.large_object_threshold < self.classes[-1]:
            raise ValueError("large_object_threshold must be >= the largest size class")

    def allocated_size(self, requested: int) -> int:
        """Round a request up to its denomination; exact above the threshold."""
        if requested <= 0:
            raise ValueError("requested bytes must be positive")
        if requested > self.large_object_threshold:
            return requested
        idx = bisect.bisect_left(self.classes, requested)
        if idx == len(self.classes):
            # between the last class and the threshold: no class fits, exact
            return requested
        return self.classes[idx]


@dataclass(frozen=True)
class HeapObject:
    """Point-in-time snapshot of one heap object (for inspection and tests)."""

    id: int
    requested: int
    allocated: int
    slots: tuple  # ObjectId or None per slot
    mark: int
    alive: bool


class Heap:
    """Object store with capacity accounting and a root set.

    Mutated by exactly one actor at a time (mutator or collector); nothing
    here is thread-safe by design.
    """

    def __init__(self, capacity_bytes: int, size_classes: SizeClassTable | None = None):
        if capacity_bytes <= 0:
            raise ValueError("capacity_bytes must be positive")
        self.capacity_bytes = capacity_bytes
        self.size_classes = size_classes or SizeClassTable()
        self.live_bytes = 0
        self.total_allocated_bytes = 0  # lifetime allocation volume
        self.gc_epoch = 0
        self.roots: set[int] = set()
        # column stores, indexed by object id
        self._requested = array("q")
        self._allocated = array("q")
        self._slot_off = array("q")
        self._slot_len = array("q")
        self._slots = array("q")
        self._mark = array("B")
        self._alive = array("B")
        self._scratch = array("q")  # work stack shared by the collector kernels

    # -- allocation ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self._allocated)

    def alloc(self, requested: int, slot_count: int = 0) -> int:
        """Allocate one object; raises OutOfMemory when capacity would be exceeded."""
        return self.bulk_alloc(requested, slot_count, 1)

    def bulk_alloc(self, requested: int, slot_count: int, count: int) -> int:
        """Allocate `count` identical objects with contiguous ids; returns the first id.

        All-or-nothing: raises OutOfMemory without allocating if the batch
        does not fit.
        """
        if count <= 0:
            raise ValueError("count must be positive")
        if slot_count < 0:
            raise ValueError("slot_count must be non-negative")
        allocated = self.size_classes.allocated_size(requested)
        total = allocated * count
        if self.live_bytes + total > self.capacity_bytes:
            raise OutOfMemory(requested, total, self.live_bytes, self.capacity_bytes)
        base = len(self._allocated)
        slot_base = len(self._slots)
        self._requested.extend([requested] * count)
        self._allocated.extend([allocated] * count)
        self._slot_off.extend(range(slot_base, slot_base + slot_count * count, slot_count)
                              if slot_count else [slot_base] * count)
        self._slot_len.extend([slot_count] * count)
        self._slots.extend([NO_REF] * (slot_count * count))
        self._mark.extend([MARK_NONE] * count)
        self._alive.extend([1] * count)
        self.live_bytes += total
        self.total_allocated_bytes += total
        return base

    # -- slots and roots ----------------------------------------------------

    def set_slot(self, obj: int, index: int, target: int | None) -> None:
        """Store a reference; liveness is decided only at collection time."""
        self._check_alive(obj)
        if not 0 <= index < self._slot_len[obj]:
            raise IndexError(f"slot {index} out of range for object {obj}")
        if target is not None:
            if not self.is_alive(target):
                raise DanglingWrite(f"object {target} is not alive")
            self._slots[self._slot_off[obj] + index] = target
        else:
            self._slots[self._slot_off[obj] + index] = NO_REF

    def slot(self, obj: int, index: int) -> int | None:
        self._check_alive(obj)
        if not 0 <= index < self._slot_len[obj]:
            raise IndexError(f"slot {index} out of range for object {obj}")
        value = self._slots[self._slot_off[obj] + index]
        return None if value == NO_REF else value

    def slots_of(self, obj: int) -> tuple:
        off = self._slot_off[obj]
        return tuple(None if v == NO_REF else v
                     for v in self._slots[off:off + self._slot_len[obj]])

    def add_root(self, obj: int) -> None:
        self._check_alive(obj)
        self.roots.add(obj)

    def remove_root(self, obj: int) -> None:
        if obj not in self.roots:
            raise KeyError(f"object {obj} is not a root")
        self.roots.remove(obj)

    # -- inspection ---------------------------------------------------------

    def is_alive(self, obj: int) -> bool:
        return 0 <= obj < len(self._alive) and bool(self._alive[obj])

    def mark_of(self, obj: int) -> int:
        return self._mark[obj]

    def allocated_of(self, obj: int) -> int:
        return self._allocated[obj]

    def requested_of(self, obj: int) -> int:
        return self._requested[obj]

    def slot_count_of(self, obj: int) -> int:
        return self._slot_len[obj]

    def object(self, obj: int) -> HeapObject:
        return HeapObject(
            id=obj,
            requested=self._requested[obj],
            allocated=self._allocated[obj],
            slots=self.slots_of(obj),
            mark=self._mark[obj],
            alive=bool(self._alive[obj]),
        )

    def alive_ids(self) -> list[int]:
        return [i for i, a in enumerate(self._alive) if a]

    def free_bytes(self) -> int:
        return self.capacity_bytes - self.live_bytes

    def audit_live_bytes(self) -> int:
        """Independent recomputation of live_bytes for invariant checks."""
        return sum(self._allocated[i] for i, a in enumerate(self._alive) if a)

    def _check_alive(self, obj: int) -> None:
        if not self.is_alive(obj):
            raise DanglingWrite(f"object {obj} is not alive")

    def _ensure_scratch(self) -> array:
        if len(self._scratch) < len(self._alive):
            self._scratch.extend([0] * (len(self._alive) - len(self._scratch)))
        return self._scratch


def reachable_from(heap: Heap, starts: Iterable[int], barriers: Iterable[int] = ()) -> set[int]:
    """Objects reachable from `starts` following slots.

    Traversal never continues through a barrier object unless that object is
    itself a start; barriers that are reached are included in the result.
    Pure: no heap mutation. Intended as the brute-force oracle the collector
    is tested against, so it deliberately shares no code with the kernels.
    """
    barrier_set = set(barriers)
    seen: set[int] = set()
    frontier: list[int] = []
    for s in starts:
        if s not in seen:
            seen.add(s)
            frontier.append(s)
    while frontier:
        obj = frontier.pop()
        off = heap._slot_off[obj]
        for value in heap._slots[off:off + heap._slot_len[obj]]:
            if value == NO_REF or value in seen:
                continue
            seen.add(value)
            if value not in barrier_set:
                frontier.append(value)
    return seen
