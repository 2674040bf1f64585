"""Process-wide worker-count setting for internal parallelism.

Results are deterministic regardless of the thread count: threads only split
batched nearest-neighbor queries, never reductions.
"""

import os

_threads = max(1, os.cpu_count() or 1)


def set_threads(n: int) -> None:
    """Set the worker count used by batched queries (>= 1)."""
    global _threads
    _threads = max(1, int(n))


def get_threads() -> int:
    return _threads
