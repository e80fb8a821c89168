"""Factorization of arbitrary-precision integers.

Trial division by every prime up to ``TRIAL_BOUND`` (done with chunked gcds
against prime products), then Pollard rho in Brent's formulation, then
elliptic-curve stages for factors too large for rho. Cofactors that survive
both are returned as unresolved.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt, prod

from .primality import probable_prime
from .sieve import primes_upto

try:
    from sympy.ntheory.ecm import _ecm_one_factor
except ImportError:  # pragma: no cover
    _ecm_one_factor = None

TRIAL_BOUND = 10**6
DEFAULT_BUDGET = 1 << 20
#: ECM stages (B1, B2, curves): roughly 15-digit, then 20-digit factors
ECM_SCHEDULE = ((2_000, 200_000, 25), (11_000, 1_100_000, 90))
ECM_SEED = 1
_CHUNK = 512


@dataclass(frozen=True)
class FactorResult:
    """Prime factors of ``n`` with multiplicity plus composites left unresolved."""

    n: int
    prime_factors: tuple[int, ...] = ()
    unresolved: tuple[int, ...] = ()

    @property
    def fully_factored(self) -> bool:
        return not self.unresolved

    @property
    def omega(self) -> int:
        """Omega of the factored part (unresolved composites not counted)."""
        return len(self.prime_factors)

    def multiset(self) -> Counter:
        return Counter(self.prime_factors)

    def check(self) -> None:
        if prod(self.prime_factors) * prod(self.unresolved) != self.n:
            raise AssertionError(f"factorization of {self.n} does not multiply back")


@dataclass(frozen=True)
class OmegaEstimate:
    """Omega value; when ``exact`` is False it is a possible undercount."""

    value: int
    exact: bool
    unresolved: tuple[int, ...] = field(default=(), compare=False, repr=False)


@lru_cache(maxsize=1)
def _trial_chunks() -> tuple[tuple[int, tuple[int, ...]], ...]:
    ps = [int(p) for p in primes_upto(TRIAL_BOUND)]
    chunks = []
    for i in range(0, len(ps), _CHUNK):
        block = tuple(ps[i : i + _CHUNK])
        chunks.append((prod(block), block))
    return tuple(chunks)


def trial_divide(n: int, bound: int = TRIAL_BOUND) -> tuple[list[int], int]:
    """Strip all prime factors <= bound; returns (factors, cofactor)."""
    found: list[int] = []
    if n < 2:
        return found, n
    while not n & 1:
        n >>= 1
        found.append(2)
    for chunk_prod, block in _trial_chunks():
        if n == 1 or block[0] > bound:
            break
        if gcd(n, chunk_prod) == 1:
            continue
        for p in block:
            if p > bound:
                break
            while n % p == 0:
                n //= p
                found.append(p)
    return found, n


def _iroot(n: int, k: int) -> int:
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def perfect_power(n: int) -> tuple[int, int] | None:
    """(root, k) with root**k == n and k >= 2 maximal-first search, else None."""
    for k in range(2, n.bit_length() + 1):
        r = isqrt(n) if k == 2 else _iroot(n, k)
        if r < 2:
            break
        if r**k == n:
            return r, k
    return None


def brent_rho(n: int, budget: int, c: int = 1, y0: int = 2, m: int = 128) -> int | None:
    """One Brent-rho attempt on composite n; a nontrivial factor or None."""
    y, r, q = y0 % n, 1, 1
    g = 1
    used = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        used += r
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gcd(q, n)
            k += m
        used += min(k, r)
        r <<= 1
        if used > budget and g == 1:
            return None
    if g == n:
        # backtrack one step at a time from the saved point
        while True:
            ys = (ys * ys + c) % n
            g = gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if 1 < g < n else None


def ecm_split(n: int, schedule=ECM_SCHEDULE, seed: int = ECM_SEED) -> int | None:
    """A nontrivial factor of composite n by elliptic curves, or None.

    ``schedule`` lists (B1, B2, curves) stages tried in order; a fixed seed
    keeps results reproducible.
    """
    if _ecm_one_factor is None:
        return None
    for b1, b2, curves in schedule:
        f = _ecm_one_factor(n, b1, b2, curves, seed=seed)
        if f is not None and 1 < f < n:
            return int(f)
    return None


def _split(n: int, budget: int, schedule=ECM_SCHEDULE) -> int | None:
    pp = perfect_power(n)
    if pp is not None:
        return pp[0]
    f = brent_rho(n, budget)
    if f is None and schedule:
        f = ecm_split(n, schedule)
    return f


def factor_big(n: int, budget: int = DEFAULT_BUDGET, ecm_schedule=ECM_SCHEDULE) -> FactorResult:
    """Factor n >= 1: trial division, Brent rho within ``budget`` steps, then ECM.

    Pass ``ecm_schedule=()`` for rho only.
    """
    if n < 1:
        raise ValueError("factor_big needs n >= 1")
    small, rest = trial_divide(n)
    primes = list(small)
    unresolved: list[int] = []
    stack = [rest] if rest > 1 else []
    while stack:
        m = stack.pop()
        if probable_prime(m):
            primes.append(m)
            continue
        f = _split(m, budget, ecm_schedule)
        if f is None:
            unresolved.append(m)
        else:
            stack.extend((f, m // f))
    return FactorResult(n, tuple(sorted(primes)), tuple(sorted(unresolved)))


def omega_of(result: FactorResult) -> OmegaEstimate:
    """Apply the counting protocol: each unresolved composite counts as two primes."""
    return OmegaEstimate(
        result.omega + 2 * len(result.unresolved),
        result.fully_factored,
        result.unresolved,
    )
