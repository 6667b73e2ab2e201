"""Halton low-discrepancy points.

Dimension ``d`` uses the ``d``-th prime as its base; point ``i`` (1-based)
has coordinates ``radical_inverse(i, prime_d)``.
"""

import math

import numpy as np

from . import kernels


def first_primes(n):
    """The first ``n`` primes as an int64 array."""
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    # Rosser's bound p_n < n (ln n + ln ln n) for n >= 6.
    limit = 15 if n < 6 else int(n * (math.log(n) + math.log(math.log(n)))) + 1
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)[:n].astype(np.int64)


def radical_inverse(index, base):
    v, f = 0.0, 1.0
    while index > 0:
        f /= base
        v += f * (index % base)
        index //= base
    return v


def halton(indices, dim, bases=None):
    """Halton points for the given 1-based indices, shape ``(len(indices), dim)``."""
    if bases is None:
        bases = first_primes(dim)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    return kernels.halton_points(indices, np.ascontiguousarray(bases[:dim], dtype=np.int64))
