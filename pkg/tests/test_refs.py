"""Priority references and spaces: ordering, bounds, freshness, isolation."""

import random

import pytest

from prioheap import Bound, Collector, DanglingReferent, Heap, InvalidBound, NotFound
from helpers import chain

UNIT = 64


def setup_space(bound=None, mode="strict"):
    heap = Heap(1 << 30)
    col = Collector(heap)
    space = col.new_space(bound or Bound.fixed(1 << 40), eviction_mode=mode)
    return heap, col, space


class TestBoundValidation:
    def test_fixed_zero_is_legal(self):
        heap, col, space = setup_space(Bound.fixed(0))
        refs = [space.new_ref(heap.alloc(UNIT), priority=i) for i in range(3)]
        col.collect()
        assert all(r.get() is None for r in refs)

    def test_fraction_one_means_whole_heap(self):
        assert Bound.fraction_of_heap(1.0).resolve(12345, 0) == 12345

    def test_fraction_out_of_range(self):
        with pytest.raises(InvalidBound):
            Bound.fraction_of_heap(1.5)
        with pytest.raises(InvalidBound):
            Bound.fraction_of_free(-0.1)

    def test_negative_fixed_rejected(self):
        with pytest.raises(InvalidBound):
            Bound.fixed(-1)

    def test_unknown_mode_rejected(self):
        with pytest.raises(InvalidBound):
            Bound("bogus", 1)


class TestNewRef:
    def test_equal_priorities_ordered_by_creation(self):
        heap, col, space = setup_space()
        a = space.new_ref(heap.alloc(UNIT), priority=5)
        b = space.new_ref(heap.alloc(UNIT), priority=5)
        assert space.ordered_refs() == [a, b]

    def test_ref_to_rooted_object_sizes_to_zero(self):
        heap, col, space = setup_space()
        obj = heap.alloc(UNIT)
        heap.add_root(obj)
        ref = space.new_ref(obj, priority=0)
        col.collect()
        assert ref.get_gc_size() == 0
        assert ref.get() == obj

    def test_ref_to_swept_object_rejected(self):
        heap, col, space = setup_space()
        obj = heap.alloc(UNIT)
        col.collect()  # unrooted, unreferenced: swept
        with pytest.raises(DanglingReferent):
            space.new_ref(obj, priority=0)


class TestPriorityUpdates:
    def test_set_then_get(self):
        heap, col, space = setup_space()
        ref = space.new_ref(heap.alloc(UNIT), priority=1)
        ref.set_priority(42)
        assert ref.get_priority() == 42

    def test_set_same_value_is_stable(self):
        heap, col, space = setup_space()
        a = space.new_ref(heap.alloc(UNIT), priority=7)
        b = space.new_ref(heap.alloc(UNIT), priority=7)
        a.set_priority(7)
        assert space.ordered_refs() == [a, b]

    def test_random_repriorities_match_sort_oracle(self):
        heap, col, space = setup_space()
        rng = random.Random(1234)
        refs = [space.new_ref(heap.alloc(UNIT), priority=rng.randint(-100, 100))
                for _ in range(40)]
        for step in range(1000):
            ref = rng.choice(refs)
            ref.set_priority(rng.randint(-100, 100))
            if step % 50 == 0 or step == 999:
                expected = sorted(refs, key=lambda r: (-r.get_priority(), r.creation_seq))
                assert space.ordered_refs() == expected


class TestDeref:
    def test_before_any_gc(self):
        heap, col, space = setup_space()
        obj = heap.alloc(UNIT)
        ref = space.new_ref(obj, priority=0)
        assert ref.get() == obj

    def test_after_eviction(self):
        heap, col, space = setup_space(Bound.fixed(0))
        ref = space.new_ref(heap.alloc(UNIT), priority=0)
        col.collect()
        assert ref.get() is None


class TestRemoveRef:
    def test_add_remove_leaves_space_empty(self):
        heap, col, space = setup_space()
        ref = space.new_ref(heap.alloc(UNIT), priority=0)
        space.remove_ref(ref)
        assert len(space) == 0
        assert space.ordered_refs() == []

    def test_remove_twice_errors(self):
        heap, col, space = setup_space()
        ref = space.new_ref(heap.alloc(UNIT), priority=0)
        space.remove_ref(ref)
        with pytest.raises(NotFound):
            space.remove_ref(ref)

    def test_removed_ref_not_sized_and_object_dies(self):
        heap, col, space = setup_space()
        obj = heap.alloc(UNIT)
        ref = space.new_ref(obj, priority=0)
        space.remove_ref(ref)
        col.collect()
        assert ref.gcsize == 0 and not ref.fresh
        assert not heap.is_alive(obj)

    def test_set_priority_after_remove_errors(self):
        heap, col, space = setup_space()
        ref = space.new_ref(heap.alloc(UNIT), priority=0)
        space.remove_ref(ref)
        with pytest.raises(NotFound):
            ref.set_priority(3)


class TestSpaceProperties:
    def test_footprint_is_sum_of_ref_sizes(self):
        heap, col, space = setup_space(Bound.fixed(96 * 2))
        refs = [space.new_ref(heap.alloc(96), priority=10 - i) for i in range(4)]
        col.collect()
        assert space.total_gcsize == sum(r.gcsize for r in refs)

    def test_argmax_invariance_under_priority_shift(self):
        outcomes = []
        for shift in (0, 1000, -250):
            heap, col, space = setup_space(Bound.fixed(300))
            refs = [space.new_ref(heap.alloc(UNIT), priority=p + shift)
                    for p in (5, 3, 9, 1, 7, 2)]
            col.collect()
            outcomes.append([r.get() is not None for r in refs])
        assert outcomes[0] == outcomes[1] == outcomes[2]

    def test_space_isolation_from_later_space_priorities(self):
        def run(b_priorities):
            heap = Heap(1 << 30)
            col = Collector(heap)
            space_a = col.new_space(Bound.fixed(200))
            space_b = col.new_space(Bound.fixed(200))
            a_refs = [space_a.new_ref(heap.alloc(UNIT), priority=p)
                      for p in (4, 2, 8)]
            for p in b_priorities:
                space_b.new_ref(heap.alloc(UNIT), priority=p)
            col.collect()
            return [r.get() is not None for r in a_refs], [r.gcsize for r in a_refs]

        assert run((1, 2, 3)) == run((30, -4, 12))
