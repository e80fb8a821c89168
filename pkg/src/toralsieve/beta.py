"""Saturation constants beta_k.

beta_k is the root in (0, k-1] of

    f_k(t) = t (1 - log t + log k) - (k - 1),

with beta_1 = 0. It is found by bisection and, independently, through the
real branch W_{-1} of the inverse of w -> w e^w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache


class BetaMethod(str, Enum):
    BISECTION = "bisection"
    LAMBERT = "lambert"
    PINNED = "pinned"


@dataclass(frozen=True)
class BetaSolution:
    k: int
    beta: float
    residual: float
    method: BetaMethod


class LambertConvergenceError(ArithmeticError):
    pass


def f_k(k: int, t: float) -> float:
    """t (1 - log t + log k) - (k - 1) on 0 < t < k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 < t < k:
        raise ValueError(f"f_k needs 0 < t < k, got t={t}, k={k}")
    return t * (1.0 - math.log(t) + math.log(k)) - (k - 1)


@lru_cache(maxsize=None)
def solve_beta(k: int) -> BetaSolution:
    """beta_k by bisection on [1e-15, k-1] to absolute tolerance 1e-13."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k == 1:
        return BetaSolution(1, 0.0, 0.0, BetaMethod.PINNED)
    lo, hi = 1e-15, float(k - 1)
    for _ in range(200):
        if hi - lo <= 1e-13:
            break
        mid = 0.5 * (lo + hi)
        if f_k(k, mid) < 0:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    return BetaSolution(k, beta, abs(f_k(k, beta)), BetaMethod.BISECTION)


def lambert_w_minus1(x: float, tol: float = 1e-14, max_iter: int = 100) -> float:
    """Real branch W_{-1}(x) for -1/e < x < 0, values in (-inf, -1].

    Halley iteration on w e^w = x seeded at log(-x) - log(-log(-x)).
    """
    if not -1.0 / math.e < x < 0.0:
        raise ValueError(f"W_-1 is real only on (-1/e, 0); got {x}")
    lx = math.log(-x)
    w = lx - math.log(-lx)
    prev = math.inf
    for _ in range(max_iter):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if f == 0.0 or wp1 == 0.0:
            return w
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = w - step
        if w_new > -1.0:
            # stay on the lower branch
            w_new = 0.5 * (w - 1.0)
        delta = abs(w_new - w)
        if delta <= tol * max(1.0, abs(w_new)):
            return w_new
        # near the branch point the update stalls at rounding level
        if delta < 1e-10 and delta >= prev:
            return w_new
        prev = delta
        w = w_new
    raise LambertConvergenceError(f"Halley iteration for W_-1({x}) did not converge")


def beta_lambert(k: int) -> float:
    """beta_k = (1 - k) / W_{-1}((1 - k) / (e k)) for k >= 2."""
    if k < 2:
        raise ValueError("closed form needs k >= 2")
    w = lambert_w_minus1((1 - k) / (math.e * k))
    return (1 - k) / w


def beta(k: int) -> float:
    return solve_beta(k).beta


def beta_table(kmax: int) -> list[BetaSolution]:
    return [solve_beta(k) for k in range(1, kmax + 1)]
