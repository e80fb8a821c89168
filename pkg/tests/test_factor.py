import math

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from toralsieve.factor import primality, rho, sieve, tables
from toralsieve.factor.protocol import OmegaOracle, omega_protocol
from toralsieve.sequences import fibonacci, lucas, mersenne


def omega_oracle(n: int) -> int:
    return sum(sympy.factorint(n).values())


# sieve


def test_primes_upto_matches_sympy():
    assert list(sieve.primes_upto(10_000)) == list(sympy.primerange(2, 10_001))
    assert sieve.primes_upto(1).size == 0


def test_omega_upto_matches_oracle():
    table = sieve.omega_upto(5000)
    assert table[1] == 0
    assert all(table[n] == omega_oracle(n) for n in range(2, 5001))


def test_spf_table():
    t = sieve.build_spf(10_000)
    for n in (1, 2, 97, 360, 9973, 10_000):
        assert sieve.omega_small(n, t) == (0 if n == 1 else omega_oracle(n))
    with pytest.raises(IndexError):
        sieve.omega_small(10_001, t)


def test_histogram_sums_to_limit():
    for T in (1, 10, 12345):
        h = sieve.omega_histogram(T)
        assert int(h.sum()) == T
    assert list(sieve.omega_histogram(10)) == [1, 4, 4, 1]


def test_segment_boundaries_are_seamless():
    parts = list(sieve.omega_segments(3000, segment=128))
    assert [lo for lo, _ in parts] == list(range(1, 3001, 128))
    whole = np.concatenate([arr for _, arr in parts])
    assert whole.size == 3000
    assert list(whole) == [0] + [omega_oracle(n) for n in range(2, 3001)]


def test_memory_ceiling(monkeypatch):
    monkeypatch.setenv("TORALSIEVE_SIEVE_BYTES", "1000")
    with pytest.raises(sieve.SieveLimitError):
        sieve.omega_upto(5000)


# primality


def test_probable_prime_small_range():
    assert [n for n in range(-5, 3000) if primality.probable_prime(n)] == list(sympy.primerange(2, 3000))


@pytest.mark.parametrize("n", [561, 1105, 3215031751, 2152302898747, 3474749660383, 341550071728321, 3825123056546413051])
def test_strong_pseudoprimes_rejected(n):
    assert not primality.probable_prime(n)


def test_large_known_primes():
    assert primality.probable_prime(2**127 - 1)
    assert primality.probable_prime(fibonacci(569))
    assert not primality.probable_prime((2**61 - 1) * (2**89 - 1))
    assert primality.is_strong_lucas_probable_prime(2**89 - 1)


@given(st.integers(1, 10**12))
def test_probable_prime_agrees_with_sympy(n):
    assert primality.probable_prime(n) == sympy.isprime(n)


@given(st.integers(-100, 100), st.integers(0, 200).map(lambda k: 2 * k + 1))
def test_jacobi_against_sympy(a, n):
    assert primality.jacobi(a, n) == sympy.jacobi_symbol(a % n, n)


def test_certification_level():
    assert primality.certification_level(97) == "proven"
    assert primality.certification_level(fibonacci(569)) == "probable"


# rho and the pipeline


def test_trial_divide():
    small, rest = rho.trial_divide(2**5 * 3 * 1_000_003)
    assert small == [2, 2, 2, 2, 2, 3]
    assert rest == 1_000_003


def test_perfect_power():
    assert rho.perfect_power(1_000_003**3) == (1_000_003, 3)
    assert rho.perfect_power(1_000_003 * 1_000_033) is None


def test_brent_rho_splits_semiprime():
    n = 1_000_003 * 998_244_353
    d = rho.brent_rho(n, 1 << 20)
    assert d in (1_000_003, 998_244_353)


def test_factor_big_fibonacci():
    res = rho.factor_big(fibonacci(100))
    res.check()
    assert res.fully_factored
    assert res.multiset() == sympy.factorint(fibonacci(100))


def test_tiny_budget_leaves_composite_counted_twice():
    n = (10**9 + 7) * (10**9 + 9) * 12
    res = rho.factor_big(n, budget=1, ecm_schedule=())
    est = rho.omega_of(res)
    assert res.unresolved == ((10**9 + 7) * (10**9 + 9),)
    assert est.value == 3 + 2 and not est.exact


@given(st.integers(2, 10**15))
def test_factor_big_against_sympy(n):
    res = rho.factor_big(n)
    res.check()
    assert res.fully_factored
    assert res.omega == omega_oracle(n)


def test_ecm_split_twenty_digit_factors():
    p, q = sympy.nextprime(10**19), sympy.nextprime(3 * 10**19)
    d = rho.ecm_split(p * q)
    assert d in (p, q)


# tables


TABLE = """\
# label index factors
F 100 3 5 5 11 41 C17
F 67 269 116849 1429913
M 67 193707721 C12
X 3 7 11
"""


def test_ingest_and_lookup():
    t = tables.ingest_factor_table(TABLE.splitlines())
    assert len(t) == 4
    assert t.labels == {"F", "M", "X"}
    assert t.get("F", 67).value == fibonacci(67)
    assert t.get("X", 3).value == 77
    assert t.get("M", 67).cofactor == 761838257287


@pytest.mark.parametrize(
    "line, error",
    [
        ("F", tables.TableFormatError),
        ("F x 2", tables.TableFormatError),
        ("F 10 1 55", tables.TableFormatError),
        ("F 10 5 12", tables.TableIntegrityError),
        ("F 10 5", tables.TableIntegrityError),
        ("L 20 C3", tables.TableIntegrityError),
    ],
)
def test_bad_lines(line, error):
    with pytest.raises(error):
        tables.ingest_factor_table([line])


def test_duplicate_entry():
    with pytest.raises(tables.TableFormatError):
        tables.ingest_factor_table(["X 1 2", "X 1 3"])


def test_protocol_uses_table_cofactor_rule():
    t = tables.ingest_factor_table(TABLE.splitlines())
    oracle = OmegaOracle(tables=[t])
    # unresolved composite cofactor of F_100 counts as two primes
    est = oracle.omega(fibonacci(100), key=("F", 100))
    assert est.value == 1 + 2 + 1 + 1 + 2 and not est.exact
    # a prime cofactor counts once
    est = oracle.omega(mersenne(67), key=("M", 67))
    assert est.value == 2 and est.exact
    assert oracle.omega(fibonacci(67)).value == 3


def test_protocol_without_tables():
    assert omega_protocol(fibonacci(100)).value == omega_oracle(fibonacci(100))
    assert omega_protocol(-lucas(50)).value == omega_oracle(lucas(50))
    assert omega_protocol(1).value == 0
    with pytest.raises(ValueError):
        omega_protocol(0)


def test_oracle_cache_does_not_change_answers():
    oracle = OmegaOracle()
    first = [oracle.omega(fibonacci(n)).value for n in range(3, 120)]
    again = [oracle.omega(fibonacci(n)).value for n in range(3, 120)]
    fresh = [omega_protocol(fibonacci(n)).value for n in range(3, 120)]
    assert first == again == fresh


def test_load_table_from_file(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text(TABLE, encoding="utf-8")
    assert len(tables.load_factor_table(p)) == 4
    assert math.prod(tables.load_factor_table(p).get("F", 67).factors) == fibonacci(67)
