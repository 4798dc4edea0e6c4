"""Counter-based random streams with scheduling-independent results.

Every Monte Carlo sample i draws from its own Philox generator keyed by
(master_seed, i), so the value of a sample never depends on how many worker
threads ran or in what order.  Threaded evaluation writes into preallocated
arrays (or fixed-size chunk accumulators reduced in chunk order), which keeps
output bytes identical for any --threads setting.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ValidationError

CHUNK_SIZE = 64


def sample_stream(seed: int, index: int) -> np.random.Generator:
    """The dedicated generator for one Monte Carlo sample."""
    if not 0 <= seed < 2**63:
        raise ValidationError(f"seed must be a nonnegative 63-bit integer, got {seed}")
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _chunk_bounds(samples: int):
    return [(s, min(s + CHUNK_SIZE, samples)) for s in range(0, samples, CHUNK_SIZE)]


def _run_chunks(work, samples: int, threads: int):
    bounds = _chunk_bounds(samples)
    if threads <= 1:
        for b in bounds:
            work(b)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, bounds))


def sample_array(
    fn, samples: int, seed: int, threads: int = 1, dtype=np.float64, index_offset: int = 0
) -> np.ndarray:
    """values[i] = fn(stream_{offset+i}) for i in range(samples), any thread count."""
    if samples < 1:
        raise ValidationError(f"need at least one sample, got {samples}")
    out = np.empty(samples, dtype=dtype)

    def work(bound):
        lo, hi = bound
        for i in range(lo, hi):
            out[i] = fn(sample_stream(seed, index_offset + i))

    _run_chunks(work, samples, threads)
    return out


def sample_vectors(
    fn,
    samples: int,
    seed: int,
    width: int,
    threads: int = 1,
    dtype=np.float64,
    index_offset: int = 0,
) -> np.ndarray:
    """rows[i] = fn(stream_{offset+i}), each a length-width vector."""
    if samples < 1:
        raise ValidationError(f"need at least one sample, got {samples}")
    out = np.empty((samples, width), dtype=dtype)

    def work(bound):
        lo, hi = bound
        for i in range(lo, hi):
            out[i] = fn(sample_stream(seed, index_offset + i))

    _run_chunks(work, samples, threads)
    return out


def accumulate_moments(fn, shape, samples: int, seed: int, threads: int = 1):
    """Elementwise sum and sum of squared moduli of fn(stream_i), reduced
    deterministically.

    Returns (total, total_sq) where total is complex and total_sq real; the
    reduction order (within chunks, then over chunk index) is fixed, so the
    result is byte-stable for any thread count.
    """
    if samples < 1:
        raise ValidationError(f"need at least one sample, got {samples}")
    bounds = _chunk_bounds(samples)
    sums = [None] * len(bounds)
    sqs = [None] * len(bounds)

    def work(job):
        ci, (lo, hi) = job
        s = np.zeros(shape, dtype=np.complex128)
        q = np.zeros(shape, dtype=np.float64)
        for i in range(lo, hi):
            v = fn(sample_stream(seed, i))
            s += v
            q += np.abs(v) ** 2
        sums[ci] = s
        sqs[ci] = q

    jobs = list(enumerate(bounds))
    if threads <= 1:
        for job in jobs:
            work(job)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, jobs))
    total = np.zeros(shape, dtype=np.complex128)
    total_sq = np.zeros(shape, dtype=np.float64)
    for ci in range(len(bounds)):
        total += sums[ci]
        total_sq += sqs[ci]
    return total, total_sq


def mean_and_stderr_from_sums(total, total_sq, samples: int):
    """Elementwise mean and standard error from accumulate_moments output."""
    mean = total / samples
    if samples < 2:
        return mean, np.zeros_like(total_sq)
    var = (total_sq - samples * np.abs(mean) ** 2) / (samples - 1)
    stderr = np.sqrt(np.maximum(var, 0.0) / samples)
    return mean, stderr


def mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and standard error (ddof=1; zero stderr for one sample)."""
    m = float(np.mean(values))
    if values.size < 2:
        return m, 0.0
    return m, float(np.std(values, ddof=1) / np.sqrt(values.size))
