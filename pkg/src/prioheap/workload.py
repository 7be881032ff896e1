"""Trace generation, trace file I/O, and the key-value benchmark driver.

Values are binary trees of fixed-shape nodes built to a byte target; misses
charge a simulated network transfer, hits charge a per-node visit, and each
collection charges work proportional to the bytes it marked. The clock is
integer nanoseconds, so identical (seed, config) runs are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .collector import CollectionStats, Collector
from .errors import OutOfMemory, SimulationCrash, TraceParseError
from .heap import Heap


@dataclass(frozen=True)
class TraceSpec:
    """Parameters of a synthetic workload."""

    unique_keys: int = 2000
    min_value: int = 10_000
    max_value: int = 50_000
    size_alpha: float = 1.2
    request_alpha: float = 0.1
    length: int = 10_000
    seed: int = 1

    def validate(self) -> None:
        if self.unique_keys <= 0:
            raise ValueError("unique_keys must be positive")
        if not 0 < self.min_value < self.max_value:
            raise ValueError("need 0 < min_value < max_value")
        if self.size_alpha <= 0 or self.request_alpha <= 0:
            raise ValueError("alphas must be positive")
        if self.length <= 0:
            raise ValueError("length must be positive")


@dataclass(frozen=True)
class TraceEvent:
    """One request: a key and the byte size of the value it names."""

    key: str
    nbytes: int


def generate_trace(spec: TraceSpec) -> list[TraceEvent]:
    """Deterministic trace: one fixed key->size table sampled from the size
    distribution, requests drawn from the rank distribution."""
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    raw = spec.min_value * (1.0 + rng.pareto(spec.size_alpha, spec.unique_keys))
    sizes = np.clip(raw, spec.min_value, spec.max_value).astype(np.int64)
    ranks: list[int] = []
    while len(ranks) < spec.length:
        raw = 1.0 + rng.pareto(spec.request_alpha, 2 * spec.length)
        # clamp in float space first: heavy tails overflow int64
        batch = np.minimum(raw, float(spec.unique_keys + 1)).astype(np.int64)
        batch = batch[batch <= spec.unique_keys]  # floor + rejection
        ranks.extend(batch[:spec.length - len(ranks)].tolist())
    return [TraceEvent(f"key_{r - 1}", int(sizes[r - 1])) for r in ranks]


def write_trace(path, trace: list[TraceEvent]) -> None:
    with open(path, "w") as fh:
        for event in trace:
            fh.write(f"{event.key:<12} {event.nbytes}\n")


def parse_trace(path) -> list[TraceEvent]:
    """Reads the two-column key/bytes format; round-trips write_trace."""
    events = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 2:
                raise TraceParseError(line_no, f"expected 'key bytes', got {line.rstrip()!r}")
            key, text = parts
            try:
                nbytes = int(text)
            except ValueError:
                raise TraceParseError(line_no, f"byte count {text!r} is not an integer") from None
            if nbytes <= 0:
                raise TraceParseError(line_no, "byte count must be positive")
            events.append(TraceEvent(key, nbytes))
    return events


DEFAULT_NODE_BYTES = 40


def value_node_count(heap: Heap, target_bytes: int, node_bytes: int = DEFAULT_NODE_BYTES) -> int:
    node_alloc = heap.size_classes.allocated_size(node_bytes)
    return max(1, target_bytes // node_alloc)


def build_value(heap: Heap, target_bytes: int, node_bytes: int = DEFAULT_NODE_BYTES) -> int:
    """Complete binary tree of two-slot nodes totalling within one node of
    the byte target; deterministic shape. Returns the root object id."""
    count = value_node_count(heap, target_bytes, node_bytes)
    base = heap.bulk_alloc(node_bytes, 2, count)
    _kernels.fill_tree_slots(heap._slots, heap._slot_off[base], base, count)
    return base


@dataclass(frozen=True)
class CostModel:
    """Simulated-time coefficients (integer nanoseconds)."""

    hit_cost_per_node_ns: int = 10
    gc_cost_per_marked_byte_ns: int = 5
    gc_fixed_cost_ns: int = 1_000_000
    miss_bandwidth_bytes_per_s: int = 10_000_000

    def miss_ns(self, nbytes: int) -> int:
        return nbytes * 1_000_000_000 // self.miss_bandwidth_bytes_per_s

    def gc_ns(self, marked_bytes: int) -> int:
        return self.gc_fixed_cost_ns + self.gc_cost_per_marked_byte_ns * marked_bytes


@dataclass
class SimClock:
    """Mutator/collector time split in simulated nanoseconds."""

    mutator_ns: int = 0
    gc_ns: int = 0

    @property
    def total_ns(self) -> int:
        return self.mutator_ns + self.gc_ns


@dataclass
class GcSample:
    """Per-collection record emitted into the gc series."""

    event_index: int
    gc_time_ns: int
    stats: CollectionStats


@dataclass
class RunReport:
    """Aggregate metrics of one driver run."""

    total_time_ns: int = 0
    mutator_time_ns: int = 0
    gc_time_ns: int = 0
    hits: int = 0
    misses: int = 0
    miss_service_time_ns: int = 0
    gc_count: int = 0
    total_allocation_bytes: int = 0
    crashed: bool = False
    gc_series: list[GcSample] = field(default_factory=list)
    max_hit_rate: float | None = None

    @property
    def requests(self) -> int:
        return self.hits + self.misses

    @property
    def hit_rate(self) -> float:
        return self.hits / self.requests if self.requests else 0.0

    @property
    def normalized_hit_rate(self) -> float | None:
        if self.max_hit_rate is None or self.max_hit_rate == 0:
            return None
        return self.hit_rate / self.max_hit_rate


class _Driver:
    """Event loop shared by the plain, multi-cache, and pressure runs."""

    def __init__(self, heap: Heap, collector: Collector, costs: CostModel,
                 node_bytes: int = DEFAULT_NODE_BYTES,
                 gc_interval_bytes: int | None = None, decision_log=None):
        self.heap = heap
        self.collector = collector
        self.costs = costs
        self.node_bytes = node_bytes
        self.gc_interval_bytes = gc_interval_bytes
        self.decision_log = decision_log
        self.clock = SimClock()
        self.gc_series: list[GcSample] = []
        self.caches: list = []
        self._alloc_at_last_gc = 0
        self._alloc_at_start = heap.total_allocated_bytes
        self.event_index = 0

    def collect_now(self) -> CollectionStats:
        stats = self.collector.collect()
        gc_ns = self.costs.gc_ns(stats.marked_bytes)
        self.clock.gc_ns += gc_ns
        self.gc_series.append(GcSample(self.event_index, gc_ns, stats))
        self._alloc_at_last_gc = self.heap.total_allocated_bytes
        if self.decision_log is not None:
            for cache in self.caches:
                update = getattr(cache, "update", None)
                if update is not None:
                    update()
                    self.decision_log.append(
                        ("gc", self.event_index, tuple(sorted(cache.last_evicted_keys))))
        return stats

    def alloc_with_gc(self, thunk):
        """Run an allocating thunk, collecting once on failure; a second
        failure is the simulated program crashing."""
        try:
            return thunk()
        except OutOfMemory:
            self.collect_now()
            try:
                return thunk()
            except OutOfMemory as exc:
                raise SimulationCrash(str(exc)) from exc

    def maybe_interval_collect(self) -> None:
        if (self.gc_interval_bytes is not None
                and self.heap.total_allocated_bytes - self._alloc_at_last_gc
                >= self.gc_interval_bytes):
            self.collect_now()

    def serve(self, cache, event: TraceEvent, report: RunReport) -> None:
        root = cache.get(event.key)
        if root is not None:
            report.hits += 1
            nodes = value_node_count(self.heap, event.nbytes, self.node_bytes)
            self.clock.mutator_ns += nodes * self.costs.hit_cost_per_node_ns
            if self.decision_log is not None:
                self.decision_log.append(("hit", self.event_index, event.key))
            return
        report.misses += 1
        ns = self.costs.miss_ns(event.nbytes)
        self.clock.mutator_ns += ns
        report.miss_service_time_ns += ns
        root = self.alloc_with_gc(
            lambda: build_value(self.heap, event.nbytes, self.node_bytes))
        cache.put(event.key, root, miss_cost=ns)
        if self.decision_log is not None:
            self.decision_log.append(("miss", self.event_index, event.key))

    def finish(self, report: RunReport) -> RunReport:
        report.mutator_time_ns = self.clock.mutator_ns
        report.gc_time_ns = self.clock.gc_ns
        report.total_time_ns = self.clock.total_ns
        report.gc_count = len(self.gc_series)
        report.total_allocation_bytes = (self.heap.total_allocated_bytes
                                         - self._alloc_at_start)
        report.gc_series = self.gc_series
        return report


def run_trace(heap: Heap, collector: Collector, cache, trace: list[TraceEvent],
              costs: CostModel = CostModel(), node_bytes: int = DEFAULT_NODE_BYTES,
              gc_interval_bytes: int | None = None, on_event=None,
              decision_log=None) -> RunReport:
    """Drive one cache over a trace; returns the aggregated report.

    A run that cannot allocate even after collecting records crashed=True
    and stops, keeping the partial totals.
    """
    driver = _Driver(heap, collector, costs, node_bytes, gc_interval_bytes,
                     decision_log)
    driver.caches.append(cache)
    report = RunReport()
    try:
        for index, event in enumerate(trace):
            driver.event_index = index
            if on_event is not None:
                on_event(driver, index)
            driver.serve(cache, event, report)
            driver.maybe_interval_collect()
    except SimulationCrash:
        report.crashed = True
    return driver.finish(report)


def compulsory_max_hit_rate(events: list[TraceEvent]) -> float:
    """Hit rate of an unbounded cache: everything but first touches hits."""
    if not events:
        return 0.0
    unique = len({e.key for e in events})
    return (len(events) - unique) / len(events)


def run_multi_frequency(heap: Heap, collector: Collector, cache_a, cache_b,
                        trace_a: list[TraceEvent], trace_b: list[TraceEvent],
                        ratio: int, total_requests: int,
                        costs: CostModel = CostModel(),
                        node_bytes: int = DEFAULT_NODE_BYTES) -> tuple[RunReport, RunReport]:
    """Interleave `ratio` requests to cache A per request to cache B.

    Each report carries its own hit/miss counters and a normalized hit rate
    against its stream's unbounded-cache maximum; collector-side fields
    (gc_count, gc, total time) are shared between both reports.
    """
    if ratio < 1:
        raise ValueError("ratio must be >= 1")
    driver = _Driver(heap, collector, costs, node_bytes)
    driver.caches += [cache_a, cache_b]
    report_a, report_b = RunReport(), RunReport()
    served_a: list[TraceEvent] = []
    served_b: list[TraceEvent] = []
    iter_a, iter_b = iter(trace_a), iter(trace_b)
    phase = 0
    try:
        for index in range(total_requests):
            driver.event_index = index
            if phase < ratio:
                event = next(iter_a, None)
                if event is None:
                    break
                served_a.append(event)
                driver.serve(cache_a, event, report_a)
            else:
                event = next(iter_b, None)
                if event is None:
                    break
                served_b.append(event)
                driver.serve(cache_b, event, report_b)
            phase = (phase + 1) % (ratio + 1)
    except SimulationCrash:
        report_a.crashed = report_b.crashed = True
    driver.finish(report_a)
    # finish() reads shared driver state; replay the shared fields onto B
    report_b.mutator_time_ns = report_a.mutator_time_ns
    report_b.gc_time_ns = report_a.gc_time_ns
    report_b.total_time_ns = report_a.total_time_ns
    report_b.gc_count = report_a.gc_count
    report_b.total_allocation_bytes = report_a.total_allocation_bytes
    report_b.gc_series = report_a.gc_series
    report_a.max_hit_rate = compulsory_max_hit_rate(served_a)
    report_b.max_hit_rate = compulsory_max_hit_rate(served_b)
    return report_a, report_b


@dataclass(frozen=True)
class PressureProfile:
    """Rooted non-cache structure grown and dismantled around the trace:
    nothing for the first third, one linked node per event while growing,
    one node unlinked per event while dismantling."""

    node_bytes: int = 4096
    nodes_per_event: int = 1


def run_pressure(heap: Heap, collector: Collector, cache, trace: list[TraceEvent],
                 profile: PressureProfile = PressureProfile(),
                 costs: CostModel = CostModel(),
                 node_bytes: int = DEFAULT_NODE_BYTES,
                 gc_interval_bytes: int | None = None) -> RunReport:
    """Three-phase memory-pressure run; returns the report with its gc series."""
    if len(trace) % 3:
        raise ValueError("pressure runs need a trace length divisible by three")
    third = len(trace) // 3
    anchor: list[int] = []  # allocated on first growth so zero-pressure runs add nothing

    def grow(driver: _Driver) -> None:
        if profile.nodes_per_event and not anchor:
            head = driver.alloc_with_gc(lambda: heap.alloc(16, 1))
            heap.add_root(head)
            anchor.append(head)

        def link_one():
            node = heap.alloc(profile.node_bytes, 1)
            heap.set_slot(node, 0, heap.slot(anchor[0], 0))
            heap.set_slot(anchor[0], 0, node)
            return node
        for _ in range(profile.nodes_per_event):
            driver.alloc_with_gc(link_one)

    def dismantle(_driver: _Driver) -> None:
        if not anchor:
            return
        for _ in range(profile.nodes_per_event):
            head = heap.slot(anchor[0], 0)
            if head is None:
                return
            heap.set_slot(anchor[0], 0, heap.slot(head, 0))

    def on_event(driver: _Driver, index: int) -> None:
        if third <= index < 2 * third:
            grow(driver)
        elif index >= 2 * third:
            dismantle(driver)

    return run_trace(heap, collector, cache, trace, costs, node_bytes,
                     gc_interval_bytes, on_event=on_event)
