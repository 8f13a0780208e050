# -*- coding: utf-8 -*-
"""Seeded randomness and the chunked worker pool.

Random streams are numpy Philox generators keyed by a
``SeedSequence(seed, spawn_key=...)``. A key names the consumer
(``'word'``, ``'ladder'``, ``'trials'``...) and, for Monte Carlo work,
the chunk index. Chunk boundaries depend only on the problem size, and
chunk results are always reduced in chunk order, so the thread count
never changes a result.
"""

from __future__ import absolute_import

import os
import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from boltons.iterutils import chunk_ranges

from salemlab.common import InvalidSpecError


THREADS_ENV_VAR = 'SALEM_LAB_THREADS'

# about 4M random bits per Monte Carlo chunk
CHUNK_BIT_BUDGET = 2 ** 22


def _key_part(part):
    if isinstance(part, int):
        if part < 0:
            raise InvalidSpecError('expected nonnegative stream key, not %r'
                                   % (part,))
        return part
    return zlib.crc32(str(part).encode('utf-8'))


def make_seed_sequence(seed, *key):
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise InvalidSpecError('expected integer seed, not %r' % (seed,))
    if not 0 <= seed < 2 ** 64:
        raise InvalidSpecError('expected 64-bit unsigned seed, not %r'
                               % (seed,))
    return np.random.SeedSequence(entropy=seed,
                                  spawn_key=tuple(_key_part(k) for k in key))


def make_rng(seed, *key):
    return np.random.Generator(np.random.Philox(make_seed_sequence(seed, *key)))


def resolve_threads(threads=None):
    "Flag value, then $SALEM_LAB_THREADS, then the logical core count."
    if threads is None:
        env_val = os.getenv(THREADS_ENV_VAR)
        if env_val:
            try:
                threads = int(env_val)
            except ValueError:
                raise InvalidSpecError('expected integer in $%s, not %r'
                                       % (THREADS_ENV_VAR, env_val))
        else:
            threads = os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise InvalidSpecError('expected at least one thread, not %r'
                               % (threads,))
    return threads


def trial_chunks(trials, word_length):
    """Splits *trials* into (chunk_index, start, stop) triples of a size
    fixed by *word_length* alone.
    """
    chunk_size = max(1, CHUNK_BIT_BUDGET // max(1, word_length))
    return [(i, start, stop) for i, (start, stop)
            in enumerate(chunk_ranges(trials, chunk_size))]


def map_ordered(func, items, threads=None):
    """Applies *func* to *items* on a thread pool and returns the
    results in input order. numpy releases the GIL in the heavy
    kernels, so threads are enough here.
    """
    items = list(items)
    threads = min(resolve_threads(threads), max(1, len(items)))
    if threads == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
