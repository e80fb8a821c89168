"""Omega with the unresolved-composite convention.

A composite with no known factor counts as exactly two primes; the
``exact`` flag records whether any such cofactor was involved, in which
case the value may undercount the true Omega.
"""

from __future__ import annotations

from math import gcd
from typing import Iterable, Sequence

from .primality import probable_prime
from .rho import DEFAULT_BUDGET, TRIAL_BOUND, FactorResult, OmegaEstimate, factor_big, omega_of, trial_divide
from .tables import FactorTable, TableEntry


class OmegaOracle:
    """Factorizer that remembers every large prime and unresolved composite it met.

    Orbits of divisibility sequences revisit the same large factors over and
    over (F_d divides F_n whenever d divides n), so dividing by known primes
    and taking gcds with known composites before running rho saves most of
    the factoring work. Results depend only on the order of queries.
    """

    def __init__(self, budget: int = DEFAULT_BUDGET, tables: Sequence[FactorTable] = ()):
        self.budget = budget
        self.tables = list(tables)
        self.primes: set[int] = set()
        self.composites: set[int] = set()
        for t in self.tables:
            self.primes.update(p for p in t.known_primes() if p > TRIAL_BOUND)

    def _strip_known(self, n: int, primes: list[int], unresolved: list[int]) -> int:
        for p in sorted(self.primes):
            while n % p == 0:
                n //= p
                primes.append(p)
        if n == 1:
            return n
        for c in sorted(self.composites):
            g = gcd(n, c)
            if g == 1:
                continue
            if g == c:
                while n % c == 0:
                    n //= c
                    unresolved.append(c)
            else:
                # a proper divisor of a remembered composite: refine it
                self.composites.discard(c)
                for piece in (g, c // g):
                    self._learn(piece)
                return self._strip_known(n, primes, unresolved)
            if n == 1:
                break
        return n

    def _learn(self, m: int) -> None:
        res = factor_big(m, self.budget)
        self.primes.update(p for p in res.prime_factors if p > TRIAL_BOUND)
        self.composites.update(res.unresolved)

    def factor(self, n: int) -> FactorResult:
        if n < 1:
            raise ValueError("factor needs n >= 1")
        small, rest = trial_divide(n)
        primes = list(small)
        unresolved: list[int] = []
        rest = self._strip_known(rest, primes, unresolved)
        if rest > 1:
            if probable_prime(rest):
                primes.append(rest)
                self.primes.add(rest)
            else:
                res = factor_big(rest, self.budget)
                primes.extend(res.prime_factors)
                unresolved.extend(res.unresolved)
                self.primes.update(p for p in res.prime_factors if p > TRIAL_BOUND)
                self.composites.update(res.unresolved)
        return FactorResult(n, tuple(sorted(primes)), tuple(sorted(unresolved)))

    def _from_entry(self, n: int, entry: TableEntry) -> OmegaEstimate:
        entry.check_against(n)
        value = 0
        unresolved: list[int] = []
        for f in entry.factors:
            if probable_prime(f):
                value += 1
            else:
                est = omega_of(self.factor(f))
                value += est.value
                unresolved.extend(est.unresolved)
        if entry.cofactor_digits:
            cof = n // entry.known_part
            if len(entry.cofactor_digits) == 1 and probable_prime(cof):
                value += 1
            else:
                value += 2 * len(entry.cofactor_digits)
                unresolved.append(cof)
        return OmegaEstimate(value, not unresolved, tuple(unresolved))

    def lookup(self, label: str, index: int) -> TableEntry | None:
        for t in self.tables:
            e = t.get(label, index)
            if e is not None:
                return e
        return None

    def omega(self, n: int, key: tuple[str, int] | None = None) -> OmegaEstimate:
        """Omega(|n|) under the protocol; ``key`` pins a table entry (label, index)."""
        n = abs(n)
        if n == 0:
            raise ValueError("Omega(0) is undefined")
        entry = None
        if key is not None:
            entry = self.lookup(*key)
        if entry is None:
            for t in self.tables:
                entry = t.by_value(n)
                if entry is not None:
                    break
        if entry is not None:
            return self._from_entry(n, entry)
        return omega_of(self.factor(n))


def omega_protocol(
    n: int,
    budget: int = DEFAULT_BUDGET,
    tables: Iterable[FactorTable] | None = None,
    key: tuple[str, int] | None = None,
) -> OmegaEstimate:
    """Omega(n) merging table knowledge with ``factor_big``.

    Each composite left without a known factor contributes exactly 2 and
    clears the ``exact`` flag.
    """
    return OmegaOracle(budget, list(tables or ())).omega(n, key)
