"""Counter-based random streams keyed by ``(seed, task)``.

Every randomized operation takes a seed and draws from
``Philox(SeedSequence([seed, task]))``, so independent tasks can run in any
order or in parallel and still reproduce bit-for-bit.
"""
import zlib

import numpy as np

__all__ = ["stream", "task_id"]


def task_id(name: str) -> int:
    """Stable integer tag for a named task."""
    return zlib.crc32(name.encode("utf-8"))


def stream(seed: int, task=0) -> np.random.Generator:
    if seed is None:
        raise ValueError("a seed is required for randomized runs")
    if isinstance(task, str):
        task = task_id(task)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(task)])))
