"""Stop-the-world mark/sweep collector with priority-ordered bounded marking.

One collection runs seven phases: resolve bounds, premark reference targets,
close over the roots (stopping at premarks), close over each priority space
in priority order under its byte bound, null evicted references, null
dangling slots, sweep. Size queries ride along after the spaces.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field

from . import _kernels
from .errors import DanglingReferent, NotFound
from .heap import Heap
from .refs import EVICT_ENTRY_BOUNDARY, PrioReference, PrioSpace, Bound

UNBOUNDED = _kernels.UNBOUNDED


def resolve_bound(space: PrioSpace, heap: Heap, non_space_live_bytes: int) -> int:
    """Concrete byte bound for one space at collection time."""
    return space.bound.resolve(heap.capacity_bytes, non_space_live_bytes)


class GcSizeFuture:
    """Deferred size-query result, filled in by the next collection."""

    __slots__ = ("query", "size", "fresh", "abandoned", "_queue")

    def __init__(self, query: int):
        self.query = query
        self.size = 0
        self.fresh = False
        self.abandoned = False
        self._queue: QueryQueue | None = None

    def has_gc_size(self) -> bool:
        return self.fresh

    def get_gc_size(self) -> int:
        """Last computed size; reading resets the freshness flag."""
        self.fresh = False
        return self.size


class QueryQueue:
    """Ordered size queries; the collector visits them front to back."""

    def __init__(self):
        self._futures: list[GcSizeFuture] = []
        self._roots: dict[int, GcSizeFuture] = {}

    def push_front(self, future: GcSizeFuture) -> None:
        self._insert(future, 0)

    def push_back(self, future: GcSizeFuture) -> None:
        self._insert(future, None)

    def _insert(self, future: GcSizeFuture, index: int | None) -> None:
        if future._queue is self:
            self._futures.remove(future)
        elif future._queue is not None:
            raise ValueError("future already resides in another queue")
        else:
            holder = self._roots.get(future.query)
            if holder is not None:
                raise ValueError(f"query root {future.query} already queued")
            self._roots[future.query] = future
            future._queue = self
        if index is None:
            self._futures.append(future)
        else:
            self._futures.insert(index, future)

    def remove(self, future: GcSizeFuture) -> None:
        if future._queue is not self:
            raise NotFound("future is not in this queue")
        self._futures.remove(future)
        del self._roots[future.query]
        future._queue = None

    def __iter__(self):
        return iter(self._futures)

    def __len__(self) -> int:
        return len(self._futures)


@dataclass
class SpaceStats:
    """Per-space outcome of one collection."""

    name: str
    bound_bytes: int
    retained_bytes: int = 0
    retained_entries: int = 0
    evicted_bytes: int = 0
    evicted_entries: int = 0
    abandoned: bool = False


@dataclass
class CollectionStats:
    """Outcome of one collection; marked_bytes + freed_bytes equals the
    live bytes that existed before the sweep."""

    gc_index: int
    marked_objects: int = 0
    marked_bytes: int = 0
    freed_objects: int = 0
    freed_bytes: int = 0
    non_space_live_bytes: int = 0
    spaces: list[SpaceStats] = field(default_factory=list)
    phase_work: dict[str, int] = field(default_factory=dict)

    @property
    def abandoned_flag(self) -> bool:
        return any(s.abandoned for s in self.spaces)

    def csv_header(self) -> list[str]:
        cols = ["gc_index", "marked_bytes", "freed_bytes", "non_space_live_bytes"]
        for s in self.spaces:
            cols += [f"{s.name}_retained_bytes", f"{s.name}_retained_entries",
                     f"{s.name}_evicted_bytes", f"{s.name}_evicted_entries"]
        cols.append("abandoned_flag")
        return cols

    def csv_row(self) -> list:
        row = [self.gc_index, self.marked_bytes, self.freed_bytes,
               self.non_space_live_bytes]
        for s in self.spaces:
            row += [s.retained_bytes, s.retained_entries,
                    s.evicted_bytes, s.evicted_entries]
        row.append(int(self.abandoned_flag))
        return row


class Collector:
    """Owns the registered spaces and query queues for one heap."""

    def __init__(self, heap: Heap, kernels=None):
        self.heap = heap
        self.spaces: list[PrioSpace] = []
        self.queues: list[QueryQueue] = []
        self.gc_count = 0
        self.last_stats: CollectionStats | None = None
        self._kernels = kernels if kernels is not None else _kernels.backend

    # -- registration ---------------------------------------------------

    def new_space(self, bound: Bound, eviction_mode: str = "strict",
                  name: str | None = None) -> PrioSpace:
        space = PrioSpace(self.heap, bound, eviction_mode,
                          name or f"space{len(self.spaces)}")
        self.spaces.append(space)
        return space

    def new_queue(self) -> QueryQueue:
        queue = QueryQueue()
        self.queues.append(queue)
        return queue

    def size_query(self, obj: int, queue: QueryQueue | None = None,
                   front: bool = False) -> GcSizeFuture:
        """Issue a size query on the structure headed by `obj`."""
        if not self.heap.is_alive(obj):
            raise DanglingReferent(f"object {obj} is not alive")
        if queue is None:
            if not self.queues:
                self.new_queue()
            queue = self.queues[0]
        future = GcSizeFuture(obj)
        if front:
            queue.push_front(future)
        else:
            queue.push_back(future)
        return future

    # -- collection -------------------------------------------------------

    def collect(self) -> CollectionStats:
        heap = self.heap
        kern = self._kernels
        allocated = heap._allocated
        slots = heap._slots
        slot_off = heap._slot_off
        slot_len = heap._slot_len
        mark = heap._mark
        alive = heap._alive
        stack = heap._ensure_scratch()
        count = len(heap)
        stats = CollectionStats(gc_index=self.gc_count)

        # snapshot reference order once; phases 2 and 4 must agree on it
        refs_by_space = [space.ordered_refs() for space in self.spaces]

        # Phase 2
        premarked = self._phase_premark(refs_by_space)

        # Phase 3: root closure, measuring the non-space live size
        roots = array("q", sorted(heap.roots))
        non_space_live = kern.root_closure(
            allocated, slots, slot_off, slot_len, mark, roots, stack)
        stats.non_space_live_bytes = non_space_live

        # Phase 1 deferred for free/adaptive bounds: they need the live size
        resolved = [space.bound.resolve(heap.capacity_bytes, non_space_live)
                    for space in self.spaces]

        # Phase 4: bounded closure per space, highest priority first
        evicted_refs: list[PrioReference] = []
        priority_work = 0
        for space, refs, bound in zip(self.spaces, refs_by_space, resolved):
            sstat = SpaceStats(name=space.name, bound_bytes=bound)
            entry_boundary = space.eviction_mode == EVICT_ENTRY_BOUNDARY
            accounted = 0
            crossed = False
            for ref in refs:
                ref.fresh = True
                ref.abandoned = False
                seed = ref._referent
                if seed is None:
                    ref.gcsize = 0
                    continue
                if crossed:
                    sstat.evicted_bytes += self._rescind(mark, allocated, seed)
                    ref.gcsize = 0
                    evicted_refs.append(ref)
                    sstat.evicted_entries += 1
                    continue
                local, status = kern.entry_closure(
                    allocated, slots, slot_off, slot_len, mark, seed,
                    accounted, bound, entry_boundary, stack)
                priority_work += local
                if status == _kernels.STATUS_ABANDONED:
                    # partial prefix stays marked one cycle; nothing accounted
                    crossed = True
                    sstat.abandoned = True
                    sstat.evicted_bytes += local
                    sstat.evicted_bytes += self._rescind(mark, allocated, seed)
                    ref.gcsize = 0
                    ref.abandoned = True
                    evicted_refs.append(ref)
                    sstat.evicted_entries += 1
                else:
                    ref.gcsize = local
                    accounted += local
                    sstat.retained_entries += 1
                    if status == _kernels.STATUS_OVER_BOUND:
                        crossed = True
            sstat.retained_bytes = accounted
            space.total_gcsize = accounted
            space.fresh = True
            stats.spaces.append(sstat)

        # size queries ride after the spaces; unbounded, no eviction
        query_work = 0
        for queue in self.queues:
            for future in queue:
                local, _ = kern.entry_closure(
                    allocated, slots, slot_off, slot_len, mark, future.query,
                    0, UNBOUNDED, False, stack)
                future.size = local
                future.fresh = True
                future.abandoned = False
                query_work += local

        # Phase 5: evicted references are cleared even if their referent
        # survives through other marks, so kept references form a prefix
        for ref in evicted_refs:
            ref._referent = None

        # Phase 6: null dangling slots out of surviving objects
        nulled = kern.fixup_slots(slots, slot_off, slot_len, mark, alive, count)

        # Phase 7: sweep
        freed_bytes, freed_objects, live_bytes, live_objects = kern.sweep(
            allocated, mark, alive, count)
        heap.live_bytes = live_bytes
        heap.gc_epoch += 1
        self.gc_count += 1

        stats.marked_objects = live_objects
        stats.marked_bytes = live_bytes
        stats.freed_objects = freed_objects
        stats.freed_bytes = freed_bytes
        stats.phase_work = {
            "premark": premarked,
            "root_closure": non_space_live,
            "priority_closure": priority_work,
            "query_closure": query_work,
            "fixup": nulled,
            "sweep": count,
        }
        self.last_stats = stats
        return stats

    def _phase_premark(self, refs_by_space) -> int:
        """Premark every non-null referent and every query root (idempotent)."""
        mark = self.heap._mark
        premarked = 0
        for refs in refs_by_space:
            for ref in refs:
                target = ref._referent
                if target is not None and mark[target] == 0:
                    mark[target] = 1
                    premarked += 1
        for queue in self.queues:
            for future in queue:
                if mark[future.query] == 0:
                    mark[future.query] = 1
                    premarked += 1
        return premarked

    @staticmethod
    def _rescind(mark, allocated, seed: int) -> int:
        """Withdraw a premark for an evicted entry; root-touched targets stay
        live (they are directly reachable and must not be swept). Returns the
        bytes released by the rescission."""
        m = mark[seed]
        if m == 1:
            mark[seed] = 0
            return allocated[seed]
        if m == 2:
            mark[seed] = 3
        return 0
