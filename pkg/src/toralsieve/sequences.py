"""Fibonacci, Lucas and Mersenne numbers by exact integer arithmetic."""

from __future__ import annotations


def _fib_pair(n: int) -> tuple[int, int]:
    # fast doubling: returns (F_n, F_{n+1})
    if n == 0:
        return 0, 1
    a, b = _fib_pair(n >> 1)
    c = a * (2 * b - a)
    d = a * a + b * b
    if n & 1:
        return d, c + d
    return c, d


def fibonacci(n: int) -> int:
    """F_n with F_0 = 0, F_1 = F_2 = 1. Negative indices are rejected."""
    if n < 0:
        raise ValueError(f"negative Fibonacci index {n}")
    return _fib_pair(n)[0]


def lucas(n: int) -> int:
    """L_n with L_0 = 2, L_1 = 1."""
    if n < 0:
        raise ValueError(f"negative Lucas index {n}")
    a, b = _fib_pair(n)
    return 2 * b - a


def mersenne(n: int) -> int:
    """M_n = 2**n - 1."""
    if n < 0:
        raise ValueError(f"negative Mersenne index {n}")
    return (1 << n) - 1


SEQUENCES = {"F": fibonacci, "L": lucas, "M": mersenne}


def sequence_value(label: str, n: int) -> int:
    try:
        fn = SEQUENCES[label]
    except KeyError:
        raise KeyError(f"no reconstructible sequence with label {label!r}") from None
    return fn(n)


def fibonacci_lucas_upto(n_max: int) -> tuple[list[int], list[int]]:
    """Lists F_0..F_{n_max} and L_0..L_{n_max} by the additive recurrence."""
    fs = [0, 1]
    ls = [2, 1]
    for _ in range(n_max - 1):
        fs.append(fs[-1] + fs[-2])
        ls.append(ls[-1] + ls[-2])
    return fs[: n_max + 1], ls[: n_max + 1]
