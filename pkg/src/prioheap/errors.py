"""Exception types shared across the simulator."""


class OutOfMemory(MemoryError):
    """Allocation would push live bytes past the heap capacity."""

    def __init__(self, requested: int, allocated: int, live: int, capacity: int):
        super().__init__(
            f"cannot allocate {allocated} bytes (requested {requested}): "
            f"{live} live of {capacity} capacity"
        )
        self.requested = requested
        self.allocated = allocated
        self.live = live
        self.capacity = capacity


class DanglingWrite(ValueError):
    """Attempt to store a reference to an object that is no longer alive."""


class DanglingReferent(ValueError):
    """Attempt to create a reference whose target is not alive."""


class InvalidBound(ValueError):
    """Space bound specification outside its legal range."""


class NotFound(KeyError):
    """Reference or entry not present where required."""


class TraceParseError(ValueError):
    """Malformed trace file; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class SimulationCrash(RuntimeError):
    """The simulated program ran out of memory even after collecting."""
