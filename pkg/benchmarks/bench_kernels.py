#!/usr/bin/env python3
"""Benchmark the pure-Python kernels against the compiled extension.

Two scenarios: a full collection over a large object graph (traversal
kernels back to back) and an end-to-end trace run. Usage:

    python benchmarks/bench_kernels.py [--objects 400000] [--events 3000]
"""

import argparse
import random
import time

from prioheap import Bound, Collector, Heap
from prioheap._kernels import pure
from prioheap.cache import Sache
from prioheap.workload import TraceSpec, generate_trace, run_trace

try:
    from prioheap._kernels import _core
except ImportError:
    _core = None


def build_graph_world(kernels, n_objects: int):
    rng = random.Random(2024)
    heap = Heap(1 << 40)
    base = heap.bulk_alloc(48, 2, n_objects)
    for i in range(0, n_objects - 2, 3):  # forest of shallow triples
        heap.set_slot(base + i, 0, base + i + 1)
        heap.set_slot(base + i, 1, base + i + 2)
    ids = range(base, base + n_objects)
    for obj in rng.sample(ids, n_objects // 20):
        heap.add_root(obj)
    col = Collector(heap, kernels=kernels)
    space = col.new_space(Bound.fixed(1 << 38))
    for obj in rng.sample(ids, n_objects // 50):
        space.new_ref(obj, priority=rng.randint(0, 1 << 20))
    return heap, col


def bench_collect(kernels, n_objects: int, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        heap, col = build_graph_world(kernels, n_objects)
        start = time.perf_counter()
        col.collect()
        best = min(best, time.perf_counter() - start)
    return best


def bench_trace(kernels, events: int, repeats: int = 3) -> float:
    trace = generate_trace(TraceSpec(unique_keys=300, min_value=30_000,
                                     max_value=60_000, length=events, seed=5))
    best = float("inf")
    for _ in range(repeats):
        heap = Heap(8 * 1024 * 1024)
        col = Collector(heap, kernels=kernels)
        cache = Sache(heap, col, Bound.fraction_of_heap(0.4))
        start = time.perf_counter()
        report = run_trace(heap, col, cache, trace)
        assert not report.crashed and report.gc_count > 0
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--objects", type=int, default=400_000)
    parser.add_argument("--events", type=int, default=3000)
    args = parser.parse_args()

    backends = [("pure", pure)]
    if _core is not None:
        backends.append(("compiled", _core))
    else:
        print("note: compiled extension not built; showing pure only")

    rows = []
    for label, runner in (("collect_large_graph", bench_collect),
                          ("trace_run", bench_trace)):
        scale = args.objects if runner is bench_collect else args.events
        timings = {name: runner(mod, scale) for name, mod in backends}
        rows.append((label, scale, timings))

    print(f"{'scenario':<22} {'scale':>8} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for label, scale, timings in rows:
        pure_t = timings["pure"]
        if "compiled" in timings:
            comp = timings["compiled"]
            print(f"{label:<22} {scale:>8} {pure_t * 1e3:>8.1f}ms {comp * 1e3:>8.1f}ms "
                  f"{pure_t / comp:>7.1f}x")
        else:
            print(f"{label:<22} {scale:>8} {pure_t * 1e3:>8.1f}ms {'-':>10} {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
