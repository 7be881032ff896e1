"""prioheap: a deterministic managed-heap simulator with priority-driven
collection, a space-aware cache, and a trace-driven benchmark harness."""

from ._kernels import BACKEND_NAME
from .collector import (
    CollectionStats,
    Collector,
    GcSizeFuture,
    QueryQueue,
    SpaceStats,
    resolve_bound,
)
from .errors import (
    DanglingReferent,
    DanglingWrite,
    InvalidBound,
    NotFound,
    OutOfMemory,
    SimulationCrash,
    TraceParseError,
)
from .heap import (
    Heap,
    HeapObject,
    SizeClassTable,
    default_size_classes,
    reachable_from,
)
from .refs import Bound, PrioReference, PrioSpace

__all__ = [
    "BACKEND_NAME",
    "Bound",
    "CollectionStats",
    "Collector",
    "DanglingReferent",
    "DanglingWrite",
    "GcSizeFuture",
    "Heap",
    "HeapObject",
    "InvalidBound",
    "NotFound",
    "OutOfMemory",
    "PrioReference",
    "PrioSpace",
    "QueryQueue",
    "SimulationCrash",
    "SizeClassTable",
    "SpaceStats",
    "TraceParseError",
    "default_size_classes",
    "reachable_from",
    "resolve_bound",
]

__version__ = "0.1.0"
