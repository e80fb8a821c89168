"""Prime factorization services: sieves, probable primes, rho, tables, Omega protocol."""

from .primality import ALT_BASES, DEFAULT_BASES, certification_level, is_prime_trial, probable_prime
from .protocol import OmegaOracle, omega_protocol
from .rho import DEFAULT_BUDGET, TRIAL_BOUND, FactorResult, OmegaEstimate, factor_big, omega_of
from .sieve import (
    SieveLimitError,
    SpfTable,
    build_spf,
    omega_histogram,
    omega_small,
    omega_upto,
    primes_upto,
)
from .tables import (
    FactorTable,
    TableEntry,
    TableFormatError,
    TableIntegrityError,
    ingest_factor_table,
    load_factor_table,
)

__all__ = [
    "ALT_BASES",
    "DEFAULT_BASES",
    "DEFAULT_BUDGET",
    "TRIAL_BOUND",
    "FactorResult",
    "FactorTable",
    "OmegaEstimate",
    "OmegaOracle",
    "SieveLimitError",
    "SpfTable",
    "TableEntry",
    "TableFormatError",
    "TableIntegrityError",
    "build_spf",
    "certification_level",
    "factor_big",
    "ingest_factor_table",
    "is_prime_trial",
    "load_factor_table",
    "omega_histogram",
    "omega_of",
    "omega_protocol",
    "omega_small",
    "omega_upto",
    "primes_upto",
    "probable_prime",
]
