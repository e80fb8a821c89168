"""Sieves over machine-size integers: primes, smallest prime factors, Omega.

All tables are numpy arrays built segment by segment so that temporary
memory stays bounded by the segment size, not by the sieve limit.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SEGMENT = 1 << 22

#: default memory budget (bytes) for a full smallest-prime-factor table
DEFAULT_BUDGET = 1 << 31

#: default ceiling for exact Omega counting
DEFAULT_CEILING = 10**8


class SieveLimitError(ValueError):
    """Requested sieve does not fit the configured ceiling or memory budget."""


def memory_budget() -> int:
    return int(os.environ.get("TORALSIEVE_SIEVE_BYTES", DEFAULT_BUDGET))


def sieve_ceiling() -> int:
    return int(os.environ.get("TORALSIEVE_SIEVE_CEILING", DEFAULT_CEILING))


@lru_cache(maxsize=8)
def _primes_upto_cached(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    is_p[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if is_p[p]:
            is_p[p * p :: 2 * p] = False
    out = np.flatnonzero(is_p).astype(np.int64)
    out.flags.writeable = False
    return out


def primes_upto(n: int) -> np.ndarray:
    """All primes p <= n as a read-only int64 array."""
    return _primes_upto_cached(int(n))


@dataclass(frozen=True)
class SpfTable:
    """Smallest prime factor of every 2 <= n <= limit.

    ``table[0]`` and ``table[1]`` are 0 and 1 respectively.
    """

    limit: int
    table: np.ndarray

    def __getitem__(self, n: int) -> int:
        if not 0 <= n <= self.limit:
            raise IndexError(f"{n} outside SPF table range [0, {self.limit}]")
        return int(self.table[n])


def build_spf(limit: int) -> SpfTable:
    """Smallest-prime-factor table up to ``limit`` (inclusive)."""
    if limit < 2:
        raise ValueError("limit must be >= 2")
    need = (limit + 1) * 4
    budget = memory_budget()
    if need > budget:
        raise SieveLimitError(
            f"SPF table to {limit} needs {need} bytes; budget is {budget} "
            "(raise TORALSIEVE_SIEVE_BYTES)"
        )
    spf = np.zeros(limit + 1, dtype=np.uint32)
    base = primes_upto(math.isqrt(limit))
    for lo in range(0, limit + 1, SEGMENT):
        hi = min(lo + SEGMENT, limit + 1)
        seg = spf[lo:hi]
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            view = seg[start - lo :: p]
            view[view == 0] = p
        idx = np.flatnonzero(seg == 0)
        seg[idx] = (idx + lo).astype(np.uint32)
    spf.flags.writeable = False
    return SpfTable(limit, spf)


def omega_small(n: int, t: SpfTable) -> int:
    """Omega(n), prime factors counted with multiplicity, via the SPF table."""
    if n < 1 or n > t.limit:
        raise IndexError(f"{n} outside SPF table range [1, {t.limit}]")
    tab = t.table
    count = 0
    while n > 1:
        n //= int(tab[n])
        count += 1
    return count


def _omega_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    rem = np.arange(lo, hi, dtype=np.int64)
    om = np.zeros(hi - lo, dtype=np.int8)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        pk = p
        while pk < hi:
            start = -(-lo // pk) * pk
            if start < hi:
                om[start - lo :: pk] += 1
                rem[start - lo :: pk] //= p
            pk *= p
    om += rem > 1
    return om


def omega_segments(limit: int, segment: int = SEGMENT):
    """Yield ``(lo, omega_array)`` covering 1..limit, Omega(1) = 0."""
    base = primes_upto(math.isqrt(limit) + 1)
    for lo in range(1, limit + 1, segment):
        hi = min(lo + segment, limit + 1)
        yield lo, _omega_segment(lo, hi, base)


def omega_upto(limit: int) -> np.ndarray:
    """Array ``om`` with ``om[n] = Omega(n)`` for 0 <= n <= limit (om[0] = 0)."""
    if (limit + 1) > memory_budget():
        raise SieveLimitError(f"Omega table to {limit} exceeds memory budget")
    out = np.zeros(limit + 1, dtype=np.int8)
    for lo, seg in omega_segments(limit):
        out[lo : lo + len(seg)] = seg
    return out


def omega_histogram(limit: int) -> np.ndarray:
    """``counts[r] = #{1 <= x <= limit : Omega(x) = r}``."""
    ceiling = sieve_ceiling()
    if limit > ceiling:
        raise SieveLimitError(
            f"T={limit} exceeds sieve ceiling {ceiling} (raise TORALSIEVE_SIEVE_CEILING)"
        )
    width = max(limit.bit_length(), 1) + 1
    counts = np.zeros(width, dtype=np.int64)
    for _, seg in omega_segments(limit):
        counts += np.bincount(seg, minlength=width)[:width]
    return np.trim_zeros(counts, "b")
