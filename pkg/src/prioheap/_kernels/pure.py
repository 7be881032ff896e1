"""Pure-Python traversal kernels; same contracts as the compiled module.

Mark codes: 0 none, 1 premark, 2 premark touched by the root closure, 3 live.
Traversal is depth-first over slots in index order via an explicit stack.
"""

UNBOUNDED = 1 << 62

STATUS_DONE = 0
STATUS_ABANDONED = 1
STATUS_OVER_BOUND = 2


def root_closure(allocated, slots, slot_off, slot_len, mark, roots, stack):
    """Mark the closure from the roots, stopping at premarked objects.

    Roots themselves are always traversed and counted, premarked or not.
    Returns the bytes of newly live-marked objects (root objects included).
    """
    live_bytes = 0
    top = 0
    for r in roots:
        if mark[r] == 3:
            continue
        mark[r] = 3
        live_bytes += allocated[r]
        stack[top] = r
        top += 1
    while top:
        top -= 1
        obj = stack[top]
        off = slot_off[obj]
        for i in range(off + slot_len[obj] - 1, off - 1, -1):
            target = slots[i]
            if target < 0:
                continue
            m = mark[target]
            if m == 0:
                mark[target] = 3
                live_bytes += allocated[target]
                stack[top] = target
                top += 1
            elif m == 1:
                mark[target] = 2
    return live_bytes


def entry_closure(allocated, slots, slot_off, slot_len, mark, seed,
                  accounted, bound, entry_boundary, stack):
    """Closure from one reference's seed, accumulating newly marked bytes.

    The seed's own bytes count only while it still carries an unconsumed
    premark that the root closure never reached. The running-sum check fires
    before an object is marked, so accounted + returned bytes never exceeds
    the bound in strict mode. Returns (local_bytes, status).
    """
    m = mark[seed]
    if m == 3:
        return 0, STATUS_DONE
    local = 0
    status = STATUS_DONE
    if m != 2:  # untouched premark (or a premark rescinded by an earlier space)
        size = allocated[seed]
        if accounted + size > bound:
            if not entry_boundary:
                return 0, STATUS_ABANDONED
            status = STATUS_OVER_BOUND
        local = size
    mark[seed] = 3
    stack[0] = seed
    top = 1
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


def fixup_slots(slots, slot_off, slot_len, mark, alive, count):
    """Null every slot of a live-marked object that references an unmarked one."""
    nulled = 0
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


def sweep(allocated, mark, alive, count):
    """Reclaim unmarked objects and clear all marks.

    Returns (freed_bytes, freed_objects, live_bytes, live_objects).
    """
    freed_bytes = 0
    freed_objects = 0
    live_bytes = 0
    live_objects = 0
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


def fill_tree_slots(slots, slot_base, first_id, count):
    """Wire `count` two-slot nodes into a complete binary tree rooted at first_id."""
    for i in range(count):
        left = 2 * i + 1
        right = 2 * i + 2
        slots[slot_base + 2 * i] = first_id + left if left < count else -1
        slots[slot_base + 2 * i + 1] = first_id + right if right < count else -1
