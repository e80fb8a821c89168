"""Indices where two Fibonacci/Lucas values are simultaneously prime.

For n >= 2 both members exceed 1, so Omega of their product is 2 exactly
when both are prime. Hits are found with the default probable-prime test
and re-checked with a disjoint Miller-Rabin base set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .beta import solve_beta
from .factor.primality import ALT_BASES, DEFAULT_BASES, certification_level, probable_prime
from .sequences import fibonacci_lucas_upto


class Pair(str, Enum):
    FF = "FF"  # F_n, F_{n+2}
    LL = "LL"  # L_n, L_{n+2}
    FL = "FL"  # F_n, L_n


@dataclass(frozen=True)
class SigmaSearchResult:
    pair_label: str
    R: int
    n_bound: int
    hits: tuple[int, ...]
    prediction: float
    certification: str = "proven"
    one_prime: tuple[int, ...] = field(default=(), compare=False)


def naive_nmax(R: int, k: int) -> float:
    """exp(R / beta_k), the naive guess for the last R-almost-prime index.

    For k = 1, beta_1 = 0 and the model has no last index with probability one.
    """
    if k < 2:
        raise ValueError("naive_nmax needs k >= 2: beta_1 = 0 and the last index is almost surely infinite")
    return math.exp(R / solve_beta(k).beta)


def search_sigma(pair: Pair | str, n_bound: int = 1000) -> SigmaSearchResult:
    """Indices 2 <= n <= n_bound where both members of the pair are prime."""
    pair = Pair(pair)
    if n_bound < 2:
        raise ValueError("n_bound must be >= 2")
    fs, ls = fibonacci_lucas_upto(n_bound + 2)
    members = {
        Pair.FF: lambda n: (fs[n], fs[n + 2]),
        Pair.LL: lambda n: (ls[n], ls[n + 2]),
        Pair.FL: lambda n: (fs[n], ls[n]),
    }[pair]
    cache: dict[int, bool] = {}

    def is_pp(v: int) -> bool:
        if v not in cache:
            cache[v] = probable_prime(v, DEFAULT_BASES)
        return cache[v]

    hits, one = [], []
    level = "proven"
    for n in range(2, n_bound + 1):
        a, b = members(n)
        pa = is_pp(a)
        pb = is_pp(b)
        if pa and pb:
            for v in (a, b):
                if not probable_prime(v, ALT_BASES):
                    raise ArithmeticError(f"index {n}: {v} failed re-verification")
                if certification_level(v) != "proven":
                    level = "probable"
            hits.append(n)
        elif pa != pb and pair is Pair.FL:
            one.append(n)
    return SigmaSearchResult(
        pair.value, 2, n_bound, tuple(hits), naive_nmax(2, 2), level, tuple(one)
    )
