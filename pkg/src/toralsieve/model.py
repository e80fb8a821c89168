"""Seeded Monte Carlo for the random-draw model.

For each n a vector (x_1, ..., x_k) is drawn uniformly from
[1, floor(C_1^n)] x ... x [1, floor(C_k^n)]. ``run_liminf`` follows
Omega(x_1 ... x_k) / log n along one sequence of draws; ``run_nmax``
samples the last index at which the product is R-almost prime.

Draws are keyed by (seed, trial, n, coordinate) through ``rng``, so a
trial's draws do not depend on which other draws were made or in what
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import rng
from .beta import solve_beta
from .factor.primality import probable_prime
from .factor.rho import DEFAULT_BUDGET, factor_big
from .factor.sieve import omega_upto, primes_upto
from .omega_stats import single_draw_prob_exact

#: draws up to this size get Omega from a sieved lookup table
TABLE_LIMIT = 1 << 22
#: trial-division bound for the vectorized Omega filter
FILTER_BOUND = 1000
#: vectorized draws must fit a signed 64-bit word
INT63 = (1 << 63) - 1

_FILTER_PRIMES = tuple(int(p) for p in primes_upto(FILTER_BOUND))


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        return Fraction(repr(c))
    return Fraction(str(c))


@dataclass(frozen=True)
class ModelConfig:
    k: int
    C: Fraction
    n_max: int
    seed: int = 0
    R_list: tuple[int, ...] = ()
    trials: int = 1
    C_list: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "C", _as_fraction(self.C))
        if self.C_list is not None:
            cl = tuple(_as_fraction(c) for c in self.C_list)
            if len(cl) != self.k:
                raise ValueError("C_list needs one growth constant per coordinate")
            object.__setattr__(self, "C_list", cl)
        object.__setattr__(self, "R_list", tuple(int(r) for r in self.R_list))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if any(c <= 1 for c in self.growth):
            raise ValueError("growth constants must exceed 1")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if any(r < self.k for r in self.R_list):
            raise ValueError("every R must be >= k")
        if self.trials < 0:
            raise ValueError("trials must be >= 0")

    @property
    def growth(self) -> tuple[Fraction, ...]:
        return self.C_list if self.C_list is not None else (self.C,) * self.k

    def bounds(self, n: int) -> tuple[int, ...]:
        """floor(C_j^n) for each coordinate, in exact arithmetic."""
        return tuple(_floor_power(c, n) for c in self.growth)

    def fits_int63(self) -> bool:
        return max(self.bounds(self.n_max)) <= INT63


@lru_cache(maxsize=65536)
def _floor_power(c: Fraction, n: int) -> int:
    return c.numerator**n // c.denominator**n


@dataclass(frozen=True)
class LiminfRecord:
    n: int
    omega: int
    ratio: float | None
    running_min: float | None


@dataclass(frozen=True)
class NmaxSample:
    trial: int
    R: int
    value: int
    censored: bool


@dataclass
class ModelRun:
    config: ModelConfig
    trial: int = 0
    records: list[LiminfRecord] = field(default_factory=list)
    nmax_samples: dict[int, list[NmaxSample]] = field(default_factory=dict)

    @property
    def beta_k(self) -> float:
        return solve_beta(self.config.k).beta


def draw_vector(n: int, config: ModelConfig, trial: int = 0, stream: str = "draw") -> tuple[int, ...]:
    """k independent uniform integers, coordinate j in [1, floor(C_j^n)]."""
    if not 1 <= n <= config.n_max:
        raise ValueError(f"n={n} outside 1..{config.n_max}")
    sid = rng.STREAMS[stream]
    return tuple(
        rng.uniform_int(b, config.seed, sid, trial, n, j) for j, b in enumerate(config.bounds(n))
    )


@lru_cache(maxsize=2)
def _omega_table(limit: int) -> np.ndarray:
    return omega_upto(limit)


def omega_exact(x: int, budget: int = DEFAULT_BUDGET) -> int:
    """Exact Omega(x); escalates the rho budget rather than accept an estimate."""
    if x <= TABLE_LIMIT:
        return int(_omega_table(TABLE_LIMIT)[x])
    for scale in (1, 8, 64):
        res = factor_big(x, budget * scale)
        if res.fully_factored:
            return res.omega
    raise ArithmeticError(f"could not fully factor draw {x}")


def run_liminf(config: ModelConfig, trial: int = 0, budget: int = DEFAULT_BUDGET) -> ModelRun:
    """One draw per n = 1..n_max, tracking Omega / log n and its running minimum."""
    run = ModelRun(config, trial)
    best: float | None = None
    for n in range(1, config.n_max + 1):
        xs = draw_vector(n, config, trial, stream="liminf")
        om = sum(omega_exact(x, budget) for x in xs)
        ratio = None
        if n >= 2:
            ratio = om / math.log(n)
            best = ratio if best is None else min(best, ratio)
        run.records.append(LiminfRecord(n, om, ratio, best))
    return run


def _strip_small(x: int, start: int = 0) -> tuple[int, int]:
    """Remove prime factors below the filter bound; returns (cofactor, count).

    Primes before index ``start`` are assumed already removed.
    """
    count = 0
    for p in _FILTER_PRIMES[start:]:
        if p * p > x:
            break
        while x % p == 0:
            x //= p
            count += 1
    return x, count


def omega_capped(x: int, cap: int) -> int:
    """Omega(x) when it is <= cap, otherwise some value > cap (cheaply)."""
    x, total = _strip_small(x)
    if total > cap:
        return total
    if x == 1:
        return total
    if x < FILTER_BOUND * FILTER_BOUND or probable_prime(x):
        return total + 1
    # composite with every prime factor above the filter bound
    if total + 2 > cap:
        return total + 2
    return total + omega_exact(x)


def omega_at_most(values: np.ndarray, R: int) -> np.ndarray:
    """Row-wise test Omega(prod of row) <= R for an (m, k) int64 array of values >= 1."""
    values = np.asarray(values, dtype=np.int64)
    m = values.shape[0]
    if m == 0:
        return np.zeros(0, dtype=bool)
    if values.max() <= TABLE_LIMIT:
        table = _omega_table(TABLE_LIMIT)
        return table[values].astype(np.int64).sum(axis=1) <= R
    rem = values.copy()
    small = np.zeros_like(rem)
    rows = np.arange(m)
    done = 0
    for p in _FILTER_PRIMES:
        if rows.size <= 16:
            break
        done += 1
        sub = rem[rows]
        cnt = small[rows]
        hit = sub % p == 0
        while hit.any():
            cnt += hit
            sub = np.where(hit, sub // p, sub)
            hit = hit & (sub % p == 0)
        rem[rows] = sub
        small[rows] = cnt
        lower = (cnt + (sub > 1)).sum(axis=1)
        rows = rows[lower <= R]
    out = np.zeros(m, dtype=bool)
    for i in rows:
        out[i] = _row_at_most([int(v) for v in rem[i]], int(small[i].sum()), R, done)
    return out


def _row_at_most(row: list[int], total: int, R: int, start: int = 0) -> bool:
    rems = []
    for x in row:
        r, c = _strip_small(x, start)
        total += c
        if total > R:
            return False
        rems.append(r)
    # prime cofactor counts 1, composite at least 2
    composite = []
    for r in rems:
        if r == 1:
            continue
        if r < FILTER_BOUND * FILTER_BOUND or probable_prime(r):
            total += 1
        else:
            total += 2
            composite.append(r)
        if total > R:
            return False
    for r in composite:
        total += omega_capped(r, R - total + 2) - 2
        if total > R:
            return False
    return True


def run_nmax(config: ModelConfig, R: int) -> list[NmaxSample]:
    """Samples of the largest n <= n_max with Omega(x_{1,n} ... x_{k,n}) <= R.

    A trial is scanned from n_max downwards and stops at its first event;
    value 0 means no event, and an event at n_max itself is censored with
    sentinel value n_max + 1.
    """
    if R < config.k:
        raise ValueError("R must be >= k")
    if not config.fits_int63():
        raise ValueError("floor(C^n_max) exceeds 2**63; lower C or n_max")
    trials = config.trials
    value = np.zeros(trials, dtype=np.int64)
    active = np.arange(trials, dtype=np.int64)
    sid = rng.STREAMS["nmax"]
    coords = np.arange(config.k, dtype=np.int64)
    for n in range(config.n_max, 0, -1):
        if active.size == 0:
            break
        bounds = np.array(config.bounds(n), dtype=np.int64)
        draws = rng.uniform_int_np(
            bounds[None, :], config.seed, sid, active[:, None], n, coords[None, :]
        )
        hit = omega_at_most(draws, R)
        value[active[hit]] = n
        active = active[~hit]
    out = []
    for t in range(trials):
        v = int(value[t])
        censored = v == config.n_max
        out.append(NmaxSample(t, R, config.n_max + 1 if censored else v, censored))
    return out


def nmax_pmf(samples: Sequence[NmaxSample]) -> dict[int, float]:
    """Empirical P[nmax = t] over uncensored values (censored ones stay in the denominator)."""
    total = len(samples)
    counts: dict[int, int] = {}
    for s in samples:
        if not s.censored:
            counts[s.value] = counts.get(s.value, 0) + 1
    return {t: c / total for t, c in sorted(counts.items())} if total else {}


def tail_slope(samples: Sequence[NmaxSample], t_lo: int = 20, t_hi: int = 200) -> float | None:
    """Least-squares slope of log P[nmax = t] against log t on t_lo <= t <= t_hi.

    Values of t never observed are left out. None when fewer than two
    points remain.
    """
    pmf = nmax_pmf(samples)
    pts = [(math.log(t), math.log(p)) for t, p in pmf.items() if t_lo <= t <= t_hi and p > 0]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


def censored_count(samples: Sequence[NmaxSample]) -> int:
    return sum(s.censored for s in samples)


@dataclass(frozen=True)
class ComparisonRecord:
    T: int
    k: int
    R: int
    samples: int
    frequency: float | None
    exact: Fraction
    deviation: float | None
    z: float | None


def empirical_vs_exact(
    T: int, k: int, R: int | Sequence[int], samples: int, seed: int
) -> list[ComparisonRecord]:
    """Monte Carlo frequency of Omega(x_1 ... x_k) <= R against the exact convolution.

    The same sample set serves every R in the list.
    """
    R_list = [R] if isinstance(R, int) else list(R)
    table = _omega_table(max(T, 2)) if T > TABLE_LIMIT else _omega_table(TABLE_LIMIT)
    totals = None
    if samples > 0:
        draws = rng.uniform_int_np(
            T,
            seed,
            rng.STREAMS["empirical"],
            np.arange(samples, dtype=np.int64)[:, None],
            T,
            np.arange(k, dtype=np.int64)[None, :],
        )
        totals = table[draws].astype(np.int64).sum(axis=1)
    out = []
    for r in R_list:
        p = single_draw_prob_exact(T, k, r)
        if totals is None:
            out.append(ComparisonRecord(T, k, r, 0, None, p, None, None))
            continue
        freq = float(np.count_nonzero(totals <= r)) / samples
        pf = float(p)
        var = pf * (1.0 - pf) / samples
        if var > 0:
            z = (freq - pf) / math.sqrt(var)
        else:
            z = 0.0 if freq == pf else math.inf
        out.append(ComparisonRecord(T, k, r, samples, freq, p, abs(freq - pf), z))
    return out
