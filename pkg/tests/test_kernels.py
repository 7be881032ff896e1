"""Pure and compiled kernels must be bit-for-bit interchangeable."""

import random

import pytest

from prioheap import Bound, Collector, Heap
from prioheap._kernels import pure
from helpers import build_random_heap

try:
    from prioheap._kernels import _core
except ImportError:
    _core = None

needs_compiled = pytest.mark.skipif(_core is None, reason="extension not built")


def run_world(kernels, seed):
    heap, rng = build_random_heap(seed, n_objects=180)
    col = Collector(heap, kernels=kernels)
    ids = heap.alive_ids()
    space = col.new_space(Bound.fixed(rng.choice([0, 500, 3000, 1 << 40])),
                          eviction_mode=rng.choice(["strict", "entry-boundary"]))
    used = set()
    refs = []
    for obj in rng.sample(ids, 8):
        if obj not in used:
            used.add(obj)
            refs.append(space.new_ref(obj, priority=rng.randint(-20, 20)))
    queue = col.new_queue()
    futures = []
    for obj in rng.sample(ids, 4):
        if obj not in used:
            used.add(obj)
            futures.append(col.size_query(obj, queue))
    stats_list = [col.collect(), col.collect()]
    return {
        "alive": [heap.is_alive(o) for o in range(len(heap))],
        "ref_sizes": [r.gcsize for r in refs],
        "ref_live": [r.get() is not None for r in refs],
        "future_sizes": [f.size for f in futures],
        "space_total": space.total_gcsize,
        "stats": [(s.marked_bytes, s.freed_bytes, s.non_space_live_bytes,
                   s.marked_objects, s.freed_objects) for s in stats_list],
    }


@needs_compiled
@pytest.mark.parametrize("seed", range(30))
def test_backends_agree_end_to_end(seed):
    assert run_world(pure, seed) == run_world(_core, seed)


@needs_compiled
def test_backends_agree_on_tree_wiring():
    h1, h2 = Heap(1 << 24), Heap(1 << 24)
    for heap, kernels in ((h1, pure), (h2, _core)):
        base = heap.bulk_alloc(40, 2, 777)
        kernels.fill_tree_slots(heap._slots, heap._slot_off[base], base, 777)
    assert list(h1._slots) == list(h2._slots)


def test_selected_backend_matches_env(monkeypatch):
    # the import-time selection honours PRIOHEAP_PURE
    import importlib
    import prioheap._kernels as sel

    monkeypatch.setenv("PRIOHEAP_PURE", "1")
    reloaded = importlib.reload(sel)
    assert reloaded.BACKEND_NAME == "pure"
    monkeypatch.delenv("PRIOHEAP_PURE")
    importlib.reload(sel)
