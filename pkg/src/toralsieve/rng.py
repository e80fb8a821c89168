"""Counter-based random words for reproducible, order-independent draws.

Every 64-bit word is a pure function of (seed, stream, trial, n, coord,
attempt, word), built from the SplitMix64 finalizer. Scalar and numpy
versions produce identical words, so a draw does not depend on how many
other draws were made before it or on execution order.
"""

from __future__ import annotations

import numpy as np

MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

STREAMS = {"liminf": 1, "nmax": 2, "empirical": 3, "draw": 4}


def _mix(z: int) -> int:
    z = (z + _GOLDEN) & MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def word(seed: int, stream: int, trial: int, n: int, coord: int, attempt: int, w: int = 0) -> int:
    h = _mix(seed & MASK)
    for field in (stream, trial, n, coord, attempt, w):
        h = _mix(h ^ (field & MASK))
    return h


def uniform_int(N: int, seed: int, stream: int, trial: int, n: int, coord: int) -> int:
    """Uniform integer in [1, N] by rejection on fixed-width words."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N == 1:
        return 1
    nwords = (N.bit_length() + 63) // 64
    space = 1 << (64 * nwords)
    limit = space - space % N
    attempt = 0
    while True:
        v = 0
        for j in range(nwords):
            v |= word(seed, stream, trial, n, coord, attempt, j) << (64 * j)
        if v < limit:
            return v % N + 1
        attempt += 1


_U = np.uint64


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = z + _U(_GOLDEN)
    z = (z ^ (z >> _U(30))) * _U(_M1)
    z = (z ^ (z >> _U(27))) * _U(_M2)
    return z ^ (z >> _U(31))


def words_np(seed: int, stream: int, trial, n, coord, attempt) -> np.ndarray:
    """Vectorized ``word(..., w=0)``; array arguments broadcast."""
    with np.errstate(over="ignore"):
        h = _mix_np(np.asarray(seed & MASK, dtype=np.uint64))
        for field in (stream, trial, n, coord, attempt, 0):
            f = np.asarray(field, dtype=np.int64).astype(np.uint64)
            h = _mix_np(h ^ f)
    return h


def uniform_int_np(N, seed: int, stream: int, trial, n, coord) -> np.ndarray:
    """Vectorized ``uniform_int`` for 1 <= N < 2**63 (broadcast over arrays)."""
    trial, n, coord, N = np.broadcast_arrays(
        np.asarray(trial, dtype=np.int64),
        np.asarray(n, dtype=np.int64),
        np.asarray(coord, dtype=np.int64),
        np.asarray(N, dtype=np.int64),
    )
    if N.size and (N.min() < 1):
        raise ValueError("N must be >= 1")
    Nu = N.astype(np.uint64)
    # 2**64 - (2**64 mod N), computed without overflow as limit = -(2**64 mod N)
    rem = (_U(MASK) % Nu + _U(1)) % Nu
    with np.errstate(over="ignore"):
        limit = _U(0) - rem
    out = np.ones(N.shape, dtype=np.int64)
    todo = np.flatnonzero((N > 1).ravel())
    attempt = 0
    flat_t, flat_n, flat_c = trial.ravel(), n.ravel(), coord.ravel()
    flat_N, flat_lim = Nu.ravel(), limit.ravel()
    flat_rem = rem.ravel()
    res = out.ravel()
    while todo.size:
        w = words_np(seed, stream, flat_t[todo], flat_n[todo], flat_c[todo], attempt)
        # rem == 0 means N divides 2**64 and every word is accepted
        ok = (flat_rem[todo] == 0) | (w < flat_lim[todo])
        idx = todo[ok]
        res[idx] = (w[ok] % flat_N[idx]).astype(np.int64) + 1
        todo = todo[~ok]
        attempt += 1
    return res.reshape(N.shape)
