"""Counts of integers by number of prime factors, and their main terms.

``N_r(T) = #{1 <= x <= T : Omega(x) = r}`` is computed exactly by a
segmented sieve. The Sathe-Selberg main term uses

    nu(z) = 1/Gamma(z+1) * prod_p (1 - z/p)^(-1) (1 - 1/p)^z,

truncated at a prime bound P with a first-order tail correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .factor.sieve import omega_histogram, primes_upto

#: band constant for the Selberg error term; a desk-scale calibration
SELBERG_BAND_CONSTANT = 3.0

DEFAULT_NU_PRIME = 10**6


@dataclass(frozen=True)
class NrTable:
    T: int
    counts: tuple[int, ...]

    def __getitem__(self, r: int) -> int:
        return self.counts[r] if 0 <= r < len(self.counts) else 0

    def cumulative(self, R: int) -> int:
        return sum(self.counts[: max(R + 1, 0)])


@dataclass(frozen=True)
class NuValue:
    z: float
    value: float
    truncation_prime: int
    tail_bound: float


@lru_cache(maxsize=16)
def count_by_omega(T: int) -> NrTable:
    """Exact N_r(T) for every r, with N_0(T) = 1 (the integer 1)."""
    if T < 1:
        raise ValueError("T must be >= 1")
    counts = omega_histogram(T)
    return NrTable(T, tuple(int(c) for c in counts))


def _loglog(T: float) -> float:
    if T < 3:
        raise ValueError(f"log log T needs T >= 3, got {T}")
    return math.log(math.log(T))


def nr_naive(T: int, r: int) -> float:
    """(T / log T) (log log T)^(r-1) / (r-1)!"""
    if r < 1:
        raise ValueError("r must be >= 1")
    ll = _loglog(T)
    return T / math.log(T) * math.exp((r - 1) * math.log(ll) - math.lgamma(r))


def nu(z: float, P: int = DEFAULT_NU_PRIME) -> NuValue:
    """nu(z) for 0 < z <= 3/2 from the Euler product over primes p <= P."""
    if not 0 < z <= 1.5:
        raise ValueError(f"nu is evaluated on (0, 3/2] only; got z={z}")
    if P < 2:
        raise ValueError("truncation bound must be >= 2")
    ps = primes_upto(P).astype(np.float64)
    inv = 1.0 / ps
    log_prod = float(np.sum(-np.log1p(-z * inv) + z * np.log1p(-inv)))
    pmax = float(ps[-1])
    # sum_{p > pmax} 1/p^2 <= 1/(pmax log pmax) up to a factor close to one
    tail_sum = 1.25 / (pmax * math.log(pmax))
    correction = 0.5 * z * (z - 1.0) * tail_sum
    log_value = log_prod + correction - math.lgamma(z + 1.0)
    value = math.exp(log_value)
    # next-order terms are bounded by z(z+1)/p^2 summed over the tail
    bound = z * (z + 1.0) * tail_sum
    return NuValue(z, value, int(ps[-1]), value * math.expm1(bound))


def selberg_range(T: int) -> float:
    return 1.5 * _loglog(T)


def nr_selberg(T: int, r: int, P: int = DEFAULT_NU_PRIME) -> float:
    """Sathe-Selberg main term nr_naive(T, r) * nu((r-1)/log log T)."""
    if r < 1 or r > selberg_range(T):
        raise ValueError(f"r={r} outside 1 <= r <= (3/2) log log T = {selberg_range(T):.4f}")
    z = (r - 1) / _loglog(T)
    factor = 1.0 if z == 0 else nu(z, P).value
    return nr_naive(T, r) * factor


def selberg_band(T: int, r: int, c: float = SELBERG_BAND_CONSTANT) -> tuple[float, float]:
    w = c * r / _loglog(T) ** 2
    return 1.0 - w, 1.0 + w


def _convolve_power(counts: list[int], k: int) -> list[int]:
    out = [1]
    for _ in range(k):
        nxt = [0] * (len(out) + len(counts) - 1)
        for i, a in enumerate(out):
            if a:
                for j, b in enumerate(counts):
                    nxt[i + j] += a * b
        out = nxt
    return out


def single_draw_prob_exact(T: int, k: int, R: int) -> Fraction:
    """P[Omega(x_1 ... x_k) <= R] for x uniform on [1, T]^k, as an exact fraction."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if R < 0:
        return Fraction(0)
    table = count_by_omega(T)
    conv = _convolve_power(list(table.counts), k)
    return Fraction(sum(conv[: R + 1]), T**k)
