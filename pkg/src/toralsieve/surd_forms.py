"""Quadratic surds, their continued fractions, and binary quadratic forms.

A surd (P + sqrt(D)) / Q is expanded with exact integer state (P, Q);
the expansion is periodic from the first repeated state. Convergents come
from the product J A_0 A_1 ... A_n (0, 1)^t with J = [[0,1],[1,0]] and
A_i = [[0,1],[1,a_i]], and the periodic part gives a hyperbolic matrix
gamma that shifts convergents by one period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import islice
from typing import Iterator, Sequence

from .beta import solve_beta
from .factor.protocol import OmegaOracle
from .factor.rho import DEFAULT_BUDGET, factor_big
from .factor.tables import FactorTable
from .figures import FigureDataset, FigurePoint, ReferenceLine
from .orbits import Mat2Q

#: safety bound on convergents scanned for a Pell solution
PELL_HORIZON = 100_000


class SurdError(ValueError):
    pass


class ShiftPropertyError(ArithmeticError):
    pass


def _is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


@dataclass(frozen=True)
class SurdSpec:
    """(P + sqrt(D)) / Q, stored normalized so that Q divides D - P^2."""

    P: int
    Q: int
    D: int

    def __post_init__(self):
        if self.Q == 0:
            raise SurdError("Q must be nonzero")
        if self.D <= 0 or _is_square(self.D):
            raise SurdError(f"D={self.D} must be a positive non-square")
        if (self.D - self.P * self.P) % self.Q:
            s = abs(self.Q)
            object.__setattr__(self, "P", self.P * s)
            object.__setattr__(self, "D", self.D * s * s)
            object.__setattr__(self, "Q", self.Q * s)

    @property
    def value(self) -> float:
        return (self.P + math.sqrt(self.D)) / self.Q


@dataclass(frozen=True)
class CFExpansion:
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise SurdError("a quadratic surd has a nonempty period")

    def term(self, i: int) -> int:
        k = len(self.preperiod)
        if i < k:
            return self.preperiod[i]
        return self.period[(i - k) % len(self.period)]

    def terms(self) -> Iterator[int]:
        i = 0
        while True:
            yield self.term(i)
            i += 1


def _floor_surd(P: int, Q: int, s: int) -> int:
    # floor((P + sqrt(D)) / Q) with s = isqrt(D), D not a square
    if Q > 0:
        return (P + s) // Q
    return -((P + s) // -Q) - 1


def cf_expand(surd: SurdSpec) -> CFExpansion:
    """Continued fraction with the minimal period, found by (P, Q) repetition."""
    P, Q, D = surd.P, surd.Q, surd.D
    s = math.isqrt(D)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(terms)
        a = _floor_surd(P, Q, s)
        terms.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    start = seen[(P, Q)]
    return CFExpansion(tuple(terms[:start]), tuple(terms[start:]))


@dataclass(frozen=True)
class Convergent:
    n: int
    p: int
    q: int


def convergents(cf: CFExpansion, n_max: int) -> Iterator[Convergent]:
    """(p_n, q_n) for n = 0..n_max as the second column of J A_0 ... A_n."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    # running product [[a, b], [c, d]], starting at J
    a, b, c, d = 0, 1, 1, 0
    for n, t in enumerate(islice(cf.terms(), n_max + 1)):
        # right-multiply by [[0, 1], [1, t]]
        a, b, c, d = b, a + b * t, d, c + d * t
        yield Convergent(n, b, d)


def _a_matrix(t: int) -> Mat2Q:
    return Mat2Q(0, 1, 1, t)


J = Mat2Q(0, 1, 1, 0)


@dataclass(frozen=True)
class SurdDecomposition:
    gamma: Mat2Q
    M: Mat2Q
    reps: tuple[tuple[int, int], ...]
    first_index: int
    period_length: int


def surd_orbit_decomposition(cf: CFExpansion, n_check: int = 400) -> SurdDecomposition:
    """gamma = M (A_{k+1} ... A_{k+l}) M^-1 and representatives v_0..v_{l-1}.

    M = J A_0 ... A_k covers the preperiod a_0..a_k. The shift
    gamma (p_n, q_n)^t = (p_{n+l}, q_{n+l})^t is checked for k <= n <= n_check.
    """
    k = len(cf.preperiod) - 1
    ell = len(cf.period)
    M = J
    for t in cf.preperiod:
        M = M @ _a_matrix(t)
    per = Mat2Q(1, 0, 0, 1)
    for t in cf.period:
        per = per @ _a_matrix(t)
    gamma = M @ per @ M.inverse()
    reps = []
    prod = M
    for j in range(ell):
        x, y = prod.apply((0, 1))
        reps.append((int(x), int(y)))
        prod = prod @ _a_matrix(cf.period[j])
    conv = [(c.p, c.q) for c in convergents(cf, n_check + ell)]
    for n in range(max(k, 0), n_check + 1):
        img = gamma.apply(conv[n])
        if img != conv[n + ell]:
            raise ShiftPropertyError(
                f"gamma (p_{n}, q_{n}) = {img}, expected {conv[n + ell]}"
            )
    return SurdDecomposition(gamma, M, tuple(reps), k, ell)


@dataclass(frozen=True)
class QuadForm:
    A: int
    B: int
    C: int

    def __post_init__(self):
        D = self.discriminant
        if D <= 0 or _is_square(D):
            raise ValueError(f"form needs positive non-square discriminant, got {D}")

    @property
    def discriminant(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def __call__(self, x: int, y: int) -> int:
        return self.A * x * x + self.B * x * y + self.C * y * y


def _pell4_small(D: int, u_max: int = 10_000) -> tuple[int, int]:
    for u in range(1, u_max + 1):
        t2 = D * u * u + 4
        if _is_square(t2):
            return math.isqrt(t2), u
    raise ArithmeticError(f"no solution of t^2 - {D} u^2 = 4 with u <= {u_max}")


def pell_fundamental(D: int, horizon: int = PELL_HORIZON) -> tuple[int, int]:
    """Least (t, u) with t, u > 0 and t^2 - D u^2 = 4, for D > 0 non-square.

    For D > 16 every primitive solution has t/u a convergent of sqrt(D), and
    a solution with gcd 2 halves to a convergent solving x^2 - D y^2 = 1.
    """
    if D <= 0 or _is_square(D):
        raise ValueError(f"D={D} must be a positive non-square")
    if D <= 16:
        return _pell4_small(D)
    cf = cf_expand(SurdSpec(0, 1, D))
    best: tuple[int, int] | None = None
    u_stop: int | None = None
    for c in convergents(cf, horizon):
        if u_stop is not None and c.q >= u_stop:
            break
        norm = c.p * c.p - D * c.q * c.q
        cand = None
        if norm == 4:
            cand = (c.p, c.q)
        elif norm == 1:
            cand = (2 * c.p, 2 * c.q)
            if u_stop is None:
                u_stop = 2 * c.q
        if cand and (best is None or cand[1] < best[1]):
            best = cand
    if best is None:
        raise ArithmeticError(f"no Pell solution for D={D} within {horizon} convergents")
    return best


def automorph(form: QuadForm) -> Mat2Q:
    """[[(t - B u)/2, -C u], [A u, (t + B u)/2]] from the least solution of t^2 - D u^2 = 4."""
    t, u = pell_fundamental(form.discriminant)
    A, B, C = form.A, form.B, form.C
    g = Mat2Q((t - B * u) // 2, -C * u, A * u, (t + B * u) // 2)
    # Q(g v) = Q(v) as polynomials: compare coefficients of x^2, xy, y^2
    (a, b), (c, d) = ((int(e) for e in row) for row in g.rows())
    coeffs = (
        A * a * a + B * a * c + C * c * c,
        2 * A * a * b + B * (a * d + b * c) + 2 * C * c * d,
        A * b * b + B * b * d + C * d * d,
    )
    if coeffs != (A, B, C) or g.det != 1:
        raise ArithmeticError(f"automorph check failed for {form}")
    return g


def is_squarefree(t: int) -> bool:
    if t == 0:
        return False
    res = factor_big(abs(t))
    if not res.fully_factored:
        raise ArithmeticError(f"could not factor {t} to test square-freeness")
    return all(c == 1 for c in res.multiset().values())


@dataclass(frozen=True)
class QuadricOrbits:
    """Solutions of Q(x, y) = t in a box, grouped under <gamma, -I>.

    Two solutions share a group only when a chain of gamma^{+-1} or -I
    steps inside the box joins them, so groups are a refinement of the
    true orbits restricted to the box.
    """

    form: QuadForm
    t: int
    height: int
    gamma: Mat2Q
    orbits: tuple[tuple[tuple[int, int], ...], ...]

    @property
    def reps(self) -> list[tuple[int, int]]:
        return [orb[0] for orb in self.orbits]

    box_limited = True


def solutions_in_box(form: QuadForm, t: int, height: int) -> list[tuple[int, int]]:
    A, B, C = form.A, form.B, form.C
    D = form.discriminant
    out = []
    for y in range(-height, height + 1):
        disc = D * y * y + 4 * A * t
        if not _is_square(disc):
            continue
        s = math.isqrt(disc)
        for root in {s, -s}:
            num = -B * y + root
            if num % (2 * A) == 0:
                x = num // (2 * A)
                if abs(x) <= height:
                    out.append((x, y))
    return sorted(set(out))


def quadric_orbit_reps(
    form: QuadForm, t: int, height: int, strict: bool = True, both_signs: bool = False
) -> QuadricOrbits | tuple[QuadricOrbits, QuadricOrbits]:
    """Solutions of Q = t with |x|, |y| <= height, merged under <gamma_Q, -I>.

    Each group is listed starting from its lexicographically least member.
    ``strict`` enforces square-free t; ``both_signs`` also returns -t.
    """
    if height < 0:
        raise ValueError("height must be >= 0")
    if strict and not is_squarefree(t):
        raise ValueError(f"t={t} is not square-free (pass strict=False to allow it)")
    if both_signs:
        return (
            quadric_orbit_reps(form, t, height, strict, False),
            quadric_orbit_reps(form, -t, height, strict, False),
        )
    gamma = automorph(form)
    ginv = gamma.inverse()
    sols = solutions_in_box(form, t, height)
    index = {v: i for i, v in enumerate(sols)}
    parent = list(range(len(sols)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for v, i in index.items():
        images = [gamma.apply(v), ginv.apply(v), (-v[0], -v[1])]
        for w in images:
            j = index.get((int(w[0]), int(w[1])))
            if j is not None:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[tuple[int, int]]] = {}
    for v, i in index.items():
        groups.setdefault(find(i), []).append(v)
    orbits = tuple(sorted(tuple(sorted(g)) for g in groups.values()))
    return QuadricOrbits(form, t, height, gamma, orbits)


def surd_ratio_series(
    surd: SurdSpec,
    n_max: int,
    tables: Sequence[FactorTable] = (),
    omega_budget: int = DEFAULT_BUDGET,
) -> FigureDataset:
    """Omega(p_n q_n) / log n for n = 2..n_max, with log log(p_n q_n) alongside."""
    cf = cf_expand(surd)
    oracle = OmegaOracle(omega_budget, tables)
    pts = []
    for c in convergents(cf, max(n_max, 0)):
        f = abs(c.p * c.q)
        if c.n < 2 or f == 0:
            continue
        om_p, om_q = oracle.omega(c.p), oracle.omega(c.q)
        value = om_p.value + om_q.value
        exact = om_p.exact and om_q.exact
        loglog = math.log(math.log(f)) if f > 2 else None
        pts.append(FigurePoint(c.n, value / math.log(c.n), "all", value, exact, loglog))
    return FigureDataset(
        title=f"convergents of ({surd.P} + sqrt({surd.D}))/{surd.Q}",
        ylabel="Omega(p_n q_n) / log n",
        points=pts,
        lines=[ReferenceLine("beta_2", solve_beta(2).beta)],
        metadata={
            "surd": [surd.P, surd.Q, surd.D],
            "preperiod": list(cf.preperiod),
            "period": list(cf.period),
            "n_max": n_max,
            "unresolved": sum(not p.exact for p in pts),
        },
        aux_label="loglog_pq",
    )
