"""Replica bookkeeping shared by the simulation modules.

Replicas are split into fixed-size chunks and every chunk draws from its
own child of one :class:`numpy.random.SeedSequence`.  Chunks are merged in
index order, so results depend on the seed and the replica count but not
on how many worker processes ran them.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Sequence, Union

import numpy as np
from scipy import stats

CHUNK_SIZE = 16384

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


def as_seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(seed.integers(0, 2**63, size=4).tolist())
    return np.random.SeedSequence(seed)


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(as_seed_sequence(seed)))


def chunk_sizes(total: int, chunk: int = CHUNK_SIZE) -> list[int]:
    full, rest = divmod(int(total), chunk)
    return [chunk] * full + ([rest] if rest else [])


def _call(fn, size, seq, kwargs):
    return fn(size, np.random.Generator(np.random.PCG64(seq)), **kwargs)


def run_chunked(fn: Callable, total: int, seed: SeedLike, workers: int = 1, **kwargs) -> list:
    """Evaluate ``fn(size, rng, **kwargs)`` over chunks of ``total`` replicas.

    ``fn`` must be a module-level function so worker processes can
    unpickle it.  The list of per-chunk results comes back in chunk order.
    """
    sizes = chunk_sizes(total)
    seqs = as_seed_sequence(seed).spawn(len(sizes))
    task = partial(_call, fn, kwargs=kwargs)
    if workers <= 1 or len(sizes) == 1:
        return [task(n, s) for n, s in zip(sizes, seqs)]
    with ProcessPoolExecutor(max_workers=min(workers, len(sizes))) as pool:
        return list(pool.map(task, sizes, seqs))


def concat(results: Sequence[tuple[np.ndarray, ...]]) -> tuple[np.ndarray, ...]:
    return tuple(np.concatenate(col) for col in zip(*results))


def z_value(confidence: float, comparisons: int = 1) -> float:
    """Two-sided normal quantile, Bonferroni-split over ``comparisons``."""
    alpha = (1.0 - confidence) / max(comparisons, 1)
    return float(stats.norm.isf(alpha / 2.0))


def binomial_half_width(p: float, n: int, z: float) -> float:
    return z * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def mean_band(values: np.ndarray, sigmas: float = 3.0) -> tuple[float, float]:
    """Sample mean and ``sigmas`` standard errors."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        raise ValueError("no values")
    sd = float(values.std(ddof=1)) if n > 1 else 0.0
    return float(values.mean()), sigmas * sd / math.sqrt(n)
