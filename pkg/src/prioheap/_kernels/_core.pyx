# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled traversal kernels; contracts mirror ._kernels.pure exactly."""

UNBOUNDED = 1 << 62

STATUS_DONE = 0
STATUS_ABANDONED = 1
STATUS_OVER_BOUND = 2


def root_closure(long long[::1] allocated, long long[::1] slots,
                 long long[::1] slot_off, long long[::1] slot_len,
                 unsigned char[::1] mark, long long[::1] roots,
                 long long[::1] stack):
    cdef long long live_bytes = 0
    cdef Py_ssize_t top = 0
    cdef Py_ssize_t k, i
    cdef long long obj, target, off
    for k in range(roots.shape[0]):
        obj = roots[k]
        if mark[obj] == 3:
            continue
        mark[obj] = 3
        live_bytes += allocated[obj]
        stack[top] = obj
        top += 1
    while top:
        top -= 1
        obj = stack[top]
        off = slot_off[obj]
        for i in range(off + slot_len[obj] - 1, off - 1, -1):
            target = slots[i]
            if target < 0:
                continue
            if mark[target] == 0:
                mark[target] = 3
                live_bytes += allocated[target]
                stack[top] = target
                top += 1
            elif mark[target] == 1:
                mark[target] = 2
    return live_bytes


def entry_closure(long long[::1] allocated, long long[::1] slots,
                  long long[::1] slot_off, long long[::1] slot_len,
                  unsigned char[::1] mark, long long seed,
                  long long accounted, long long bound, bint entry_boundary,
                  long long[::1] stack):
    cdef int m = mark[seed]
    if m == 3:
        return 0, STATUS_DONE
    cdef long long local = 0
    cdef int status = STATUS_DONE
    cdef long long size
    if m != 2:
        size = allocated[seed]
        if accounted + size > bound:
            if not entry_boundary:
                return 0, STATUS_ABANDONED
            status = STATUS_OVER_BOUND
        local = size
    mark[seed] = 3
    cdef Py_ssize_t top = 1
    cdef Py_ssize_t i
    cdef long long obj, target, off
    stack[0] = seed
    while top:
        top -= 1
        obj = stack[top]
        off = slot_off[obj]
        for i in range(off + slot_len[obj] - 1, off - 1, -1):
            target = slots[i]
            if target < 0:
                continue
            if mark[target] != 0:
                continue
            size = allocated[target]
            if status == STATUS_DONE and accounted + local + size > bound:
                if not entry_boundary:
                    return local, STATUS_ABANDONED
                status = STATUS_OVER_BOUND
            mark[target] = 3
            local += size
            stack[top] = target
            top += 1
    return local, status


def fixup_slots(long long[::1] slots, long long[::1] slot_off,
                long long[::1] slot_len, unsigned char[::1] mark,
                unsigned char[::1] alive, Py_ssize_t count):
    cdef long long nulled = 0
    cdef Py_ssize_t obj, i
    cdef long long target, off
    for obj in range(count):
        if not alive[obj] or mark[obj] != 3:
            continue
        off = slot_off[obj]
        for i in range(off, off + slot_len[obj]):
            target = slots[i]
            if target >= 0 and mark[target] != 3:
                slots[i] = -1
                nulled += 1
    return nulled


def sweep(long long[::1] allocated, unsigned char[::1] mark,
          unsigned char[::1] alive, Py_ssize_t count):
    cdef long long freed_bytes = 0, live_bytes = 0
    cdef long long freed_objects = 0, live_objects = 0
    cdef Py_ssize_t obj
    for obj in range(count):
        if alive[obj]:
            if mark[obj] == 3:
                live_bytes += allocated[obj]
                live_objects += 1
            else:
                alive[obj] = 0
                freed_bytes += allocated[obj]
                freed_objects += 1
        mark[obj] = 0
    return freed_bytes, freed_objects, live_bytes, live_objects


def fill_tree_slots(long long[::1] slots, long long slot_base,
                    long long first_id, long long count):
    cdef long long i, left, right
    for i in range(count):
        left = 2 * i + 1
        right = 2 * i + 2
        slots[slot_base + 2 * i] = first_id + left if left < count else -1
        slots[slot_base + 2 * i + 1] = first_id + right if right < count else -1
