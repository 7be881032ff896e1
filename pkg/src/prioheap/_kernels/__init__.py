"""Kernel backend selection: compiled extension when available, else pure Python.

Set PRIOHEAP_PURE=1 to force the fallback (used by tests and the benchmark).
"""

import os

from . import pure

if os.environ.get("PRIOHEAP_PURE"):
    backend = pure
    BACKEND_NAME = "pure"
else:
    try:
        from . import _core as backend
        BACKEND_NAME = "compiled"
    except ImportError:
        backend = pure
        BACKEND_NAME = "pure"

UNBOUNDED = pure.UNBOUNDED
STATUS_DONE = pure.STATUS_DONE
STATUS_ABANDONED = pure.STATUS_ABANDONED
STATUS_OVER_BOUND = pure.STATUS_OVER_BOUND

root_closure = backend.root_closure
entry_closure = backend.entry_closure
fixup_slots = backend.fixup_slots
sweep = backend.sweep
fill_tree_slots = backend.fill_tree_slots
