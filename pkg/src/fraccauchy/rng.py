"""Keyed counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, purpose, index)``, so a
block of paths draws the same numbers no matter which worker handles it or
in what order blocks are scheduled.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = ["BLOCK_SIZE", "stream", "block_sizes", "map_blocks", "merge_moments"]

# paths per keyed block; fixed so results do not depend on the worker count
BLOCK_SIZE = 1 << 15


def _purpose_key(purpose):
    if isinstance(purpose, int):
        return purpose
    return zlib.crc32(str(purpose).encode())


def stream(seed, purpose="default", index=0):
    """Independent generator for ``(seed, purpose, index)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(_purpose_key(purpose), int(index)))
    return np.random.Generator(np.random.Philox(ss))


def block_sizes(n, block=BLOCK_SIZE):
    full, rest = divmod(int(n), block)
    return [block] * full + ([rest] if rest else [])


def map_blocks(fn, n, seed, purpose, threads=1, block=BLOCK_SIZE):
    """Run ``fn(generator, size)`` over fixed-size keyed blocks, in order.

    Returns the list of per-block results; ordering and content are
    independent of ``threads``.
    """
    sizes = block_sizes(n, block)
    jobs = [(stream(seed, purpose, i), size) for i, size in enumerate(sizes)]
    if threads <= 1 or len(jobs) <= 1:
        return [fn(g, size) for g, size in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def merge_moments(parts):
    """Combine per-block ``(count, mean, sum of squared deviations)`` in order.

    Uses the pairwise update of Chan, Golub and LeVeque, so constant samples
    give an exactly zero spread.
    """
    n_tot, mean, m2 = 0, 0.0, 0.0
    for size, bmean, bm2 in parts:
        delta = bmean - mean
        total = n_tot + size
        mean = mean + delta * (size / total)
        m2 = m2 + bm2 + delta * delta * (n_tot * size / total)
        n_tot = total
    return n_tot, mean, m2
