"""Almost-prime statistics of random draws and of integer orbits under 2x2 matrices."""

from .beta import beta, beta_lambert, beta_table, solve_beta
from .omega_stats import count_by_omega, nr_naive, nr_selberg, nu, single_draw_prob_exact
from .orbits import Mat2Q, OrbitSpec, is_hyperbolic, iterate_orbit, named_orbit, verify_identities
from .sporadic import naive_nmax, search_sigma

__version__ = "0.1.0"

__all__ = [
    "Mat2Q",
    "OrbitSpec",
    "beta",
    "beta_lambert",
    "beta_table",
    "count_by_omega",
    "is_hyperbolic",
    "iterate_orbit",
    "naive_nmax",
    "named_orbit",
    "nr_naive",
    "nr_selberg",
    "nu",
    "search_sigma",
    "single_draw_prob_exact",
    "solve_beta",
    "verify_identities",
]
