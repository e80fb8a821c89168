"""Probable-prime testing: strong Fermat (Miller-Rabin) bases plus a strong Lucas test.

The default base set {2, 3, ..., 37} (the first twelve primes) is a
deterministic Miller-Rabin witness set for every n < 3.3e24, which covers
n < 2**64 with room to spare; above that the combined test is a BPSW-style
probable-prime test.
"""

from __future__ import annotations

from math import isqrt

DEFAULT_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

#: an independent witness set used to re-verify hits
ALT_BASES = (41, 43, 47, 53, 59, 61, 67, 71)

DETERMINISTIC_LIMIT = 3317044064679887385961981

_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
          73, 79, 83, 89, 97)


def is_strong_probable_prime(n: int, a: int) -> bool:
    """Strong Fermat test of odd n > 2 to base a."""
    a %= n
    if a in (0, 1, n - 1):
        return True
    d = n - 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def jacobi(a: int, n: int) -> int:
    if n <= 0 or not n & 1:
        raise ValueError("jacobi symbol needs odd positive modulus")
    a %= n
    result = 1
    while a:
        while not a & 1:
            a >>= 1
            if n & 7 in (3, 5):
                result = -result
        a, n = n, a
        if a & 3 == 3 and n & 3 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _selfridge(n: int) -> tuple[int, int, int] | None:
    # method A parameters; None signals a perfect square
    d = 5
    while True:
        j = jacobi(d, n)
        if j == -1:
            return d, 1, (1 - d) // 4
        if j == 0 and abs(d) != n:
            return 0, 0, 0
        d = -d - 2 if d > 0 else -d + 2
        if d == 13 and isqrt(n) ** 2 == n:
            return None


def is_strong_lucas_probable_prime(n: int) -> bool:
    """Strong Lucas test with Selfridge parameters, odd n > 2."""
    params = _selfridge(n)
    if params is None:
        return False
    D, P, Q = params
    if D == 0:
        return False
    d = n + 1
    s = 0
    while not d & 1:
        d >>= 1
        s += 1
    # binary ladder for U_d, V_d, Q^d
    U, V, Qk = 1, P, Q
    inv2 = (n + 1) // 2
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        if V == 0:
            return True
        Qk = Qk * Qk % n
    return False


def probable_prime(n: int, bases: tuple[int, ...] = DEFAULT_BASES) -> bool:
    """True if n passes trial division, strong tests to ``bases`` and strong Lucas."""
    if n < 2:
        return False
    for p in _SMALL:
        if n % p == 0:
            return n == p
    if n < 97 * 97:
        return True
    for a in bases:
        if not is_strong_probable_prime(n, a):
            return False
    if bases == DEFAULT_BASES and n < DETERMINISTIC_LIMIT:
        return True
    return is_strong_lucas_probable_prime(n)


def certification_level(n: int) -> str:
    """'proven' inside the deterministic range of the default bases, else 'probable'."""
    return "proven" if n < DETERMINISTIC_LIMIT else "probable"


def is_prime_trial(n: int) -> bool:
    """Plain trial division; an oracle for small n only."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True

