"""Orbits of integer vectors under powers of a 2x2 rational matrix.

Points are computed exactly; Omega of x*y goes through the unresolved
composite protocol, with x and y factored separately since the named
orbits come from sequences with tabulated factorizations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .beta import solve_beta
from .factor.protocol import OmegaOracle
from .factor.rho import DEFAULT_BUDGET, OmegaEstimate
from .factor.tables import FactorTable
from .figures import FigureDataset, FigurePoint, ReferenceLine
from .sequences import fibonacci_lucas_upto, mersenne

log = logging.getLogger(__name__)

#: iterates checked for integrality when an OrbitSpec is built
INTEGRALITY_HORIZON = 50
#: figure datasets start once log log|xy| exceeds this
FIGURE_LOGLOG_FLOOR = 0.05


class OrbitIntegrityError(ArithmeticError):
    """An iterate left Z^2, or an identity failed."""


@dataclass(frozen=True)
class Mat2Q:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def parse(cls, text: str) -> "Mat2Q":
        """'a,b,c,d' with integer or p/q entries, row-major."""
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated entries, got {text!r}")
        try:
            return cls(*(Fraction(p) for p in parts))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"bad matrix entries in {text!r}") from None

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    @property
    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in (self.a, self.b, self.c, self.d))

    def rows(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return (self.a, self.b), (self.c, self.d)

    def __matmul__(self, other: "Mat2Q") -> "Mat2Q":
        return Mat2Q(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def apply(self, v: Sequence) -> tuple[Fraction, Fraction]:
        x, y = v
        return self.a * x + self.b * y, self.c * x + self.d * y

    def inverse(self) -> "Mat2Q":
        det = self.det
        if det == 0:
            raise ZeroDivisionError("singular matrix")
        return Mat2Q(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def power(self, n: int) -> "Mat2Q":
        if n < 0:
            return self.inverse().power(-n)
        result, base = IDENTITY, self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result


IDENTITY = Mat2Q(1, 0, 0, 1)


def is_hyperbolic(gamma: Mat2Q) -> bool:
    """Two distinct real eigenvalues: tr^2 - 4 det > 0, exactly."""
    return gamma.trace**2 - 4 * gamma.det > 0


@dataclass(frozen=True)
class CoordKey:
    """Coordinate j at orbit index n is +-<label>_{scale*n + shift}."""

    label: str
    scale: int
    shift: int

    def index(self, n: int) -> int:
        return self.scale * n + self.shift


class _Stepper:
    """gamma applied to integer vectors with one common denominator."""

    def __init__(self, gamma: Mat2Q):
        den = math.lcm(*(e.denominator for e in (gamma.a, gamma.b, gamma.c, gamma.d)))
        self.den = den
        self.m = tuple(int(e * den) for e in (gamma.a, gamma.b, gamma.c, gamma.d))

    def __call__(self, x: int, y: int) -> tuple[int, int]:
        a, b, c, d = self.m
        nx, ny = a * x + b * y, c * x + d * y
        if self.den != 1:
            if nx % self.den or ny % self.den:
                raise OrbitIntegrityError(
                    f"iterate ({Fraction(nx, self.den)}, {Fraction(ny, self.den)}) is not integral"
                )
            nx //= self.den
            ny //= self.den
        return nx, ny


@dataclass(frozen=True)
class OrbitSpec:
    gamma: Mat2Q
    v0: tuple[int, int]
    label: str | None = None
    keys: tuple[CoordKey, CoordKey] | None = None
    index_offset: int = 0

    def __post_init__(self):
        x, y = self.v0
        if int(x) != x or int(y) != y:
            raise ValueError("v0 must be an integer vector")
        object.__setattr__(self, "v0", (int(x), int(y)))
        if self.v0 == (0, 0):
            raise ValueError("v0 must be nonzero")
        if self.gamma.det == 0:
            raise ValueError("gamma must be invertible")
        step = _Stepper(self.gamma)
        v = self.v0
        for _ in range(INTEGRALITY_HORIZON):
            v = step(*v)

    def points(self, n_max: int) -> Iterator[tuple[int, int, int]]:
        """(n, x, y) for n = 0..n_max."""
        step = _Stepper(self.gamma)
        x, y = self.v0
        for n in range(n_max + 1):
            if n:
                x, y = step(x, y)
            yield n, x, y


@dataclass(frozen=True)
class OrbitPoint:
    n: int
    x: int
    y: int
    f_value: int
    omega: OmegaEstimate
    ratio: float | None
    running_min: float | None


_HALF = Fraction(1, 2)

NAMED_ORBITS = {
    # (F_{n+1}, L_{n+1})
    "fibonacci_lucas": OrbitSpec(
        Mat2Q(_HALF, _HALF, Fraction(5, 2), _HALF), (1, 1), "fibonacci_lucas",
        (CoordKey("F", 1, 1), CoordKey("L", 1, 1)), 1,
    ),
    # (F_{n+1}, F_n)
    "consecutive_fibonacci": OrbitSpec(
        Mat2Q(1, 1, 1, 0), (1, 0), "consecutive_fibonacci",
        (CoordKey("F", 1, 1), CoordKey("F", 1, 0)), 0,
    ),
    # (L_{n+1}, L_n)
    "consecutive_lucas": OrbitSpec(
        Mat2Q(1, 1, 1, 0), (1, 2), "consecutive_lucas",
        (CoordKey("L", 1, 1), CoordKey("L", 1, 0)), 0,
    ),
    # (F_{2n+2}, -F_{2n})
    "even_fibonacci": OrbitSpec(
        Mat2Q(3, 1, -1, 0), (1, 0), "even_fibonacci",
        (CoordKey("F", 2, 2), CoordKey("F", 2, 0)), 0,
    ),
    # (M_{n+1}, M_n)
    "consecutive_mersenne": OrbitSpec(
        Mat2Q(3, -2, 1, 0), (1, 0), "consecutive_mersenne",
        (CoordKey("M", 1, 1), CoordKey("M", 1, 0)), 0,
    ),
}


def named_orbit(label: str) -> OrbitSpec:
    try:
        return NAMED_ORBITS[label]
    except KeyError:
        known = ", ".join(sorted(NAMED_ORBITS))
        raise KeyError(f"unknown orbit {label!r}; known: {known}") from None


def _ratio(omega: int, n: int, x: int, y: int, denominator: str) -> float | None:
    if denominator == "loglog":
        f = abs(x * y)
        # |xy| <= e leaves log log undefined or <= 0
        if f <= 2:
            return None
        return omega / math.log(math.log(f))
    if denominator == "logn":
        return omega / math.log(n) if n >= 2 else None
    raise ValueError(f"unknown denominator {denominator!r}")


def iterate_orbit(
    spec: OrbitSpec,
    n_max: int,
    omega_budget: int = DEFAULT_BUDGET,
    tables: Sequence[FactorTable] = (),
    allow_nonhyperbolic: bool = False,
    denominator: str = "loglog",
    oracle: OmegaOracle | None = None,
) -> Iterator[OrbitPoint]:
    """Points gamma^n v0 for n = 0..n_max with Omega(|xy|) and its ratio.

    Points with xy = 0 are skipped. ``denominator`` is "loglog" for
    log log|xy| or "logn" for log of the sequence index n + index_offset.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if not allow_nonhyperbolic and not is_hyperbolic(spec.gamma):
        raise ValueError("gamma is not hyperbolic (pass allow_nonhyperbolic to override)")
    if oracle is None:
        oracle = OmegaOracle(omega_budget, tables)
    best: float | None = None
    for n, x, y in spec.points(n_max):
        if x == 0 or y == 0:
            log.info("skipping n=%d: x*y = 0", n)
            continue
        parts = []
        for j, v in enumerate((x, y)):
            key = None
            if spec.keys is not None:
                ck = spec.keys[j]
                key = (ck.label, ck.index(n))
            parts.append(oracle.omega(v, key))
        om = OmegaEstimate(
            parts[0].value + parts[1].value,
            parts[0].exact and parts[1].exact,
            parts[0].unresolved + parts[1].unresolved,
        )
        ratio = _ratio(om.value, n + spec.index_offset, x, y, denominator)
        if ratio is not None:
            best = ratio if best is None else min(best, ratio)
        yield OrbitPoint(n, x, y, x * y, om, ratio, best)


@dataclass(frozen=True)
class IdentityReport:
    n_max: int
    checks: tuple[str, ...]


def verify_identities(n_max: int) -> IdentityReport:
    """F_2n = F_n L_n, L_n^2 - 5 F_n^2 = 4(-1)^n and M_2l = M_l (M_l + 2), for n <= n_max.

    Raises OrbitIntegrityError on the first failure.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    fs, ls = fibonacci_lucas_upto(2 * n_max)
    for n in range(1, n_max + 1):
        if fs[2 * n] != fs[n] * ls[n]:
            raise OrbitIntegrityError(f"F_{2 * n} != F_{n} L_{n}")
        if ls[n] ** 2 - 5 * fs[n] ** 2 != 4 * (-1) ** n:
            raise OrbitIntegrityError(f"L_{n}^2 - 5 F_{n}^2 != {4 * (-1) ** n}")
        m = mersenne(n)
        if mersenne(2 * n) != m * (m + 2):
            raise OrbitIntegrityError(f"M_{2 * n} != M_{n} (M_{n} + 2)")
    return IdentityReport(n_max, ("F_2n = F_n L_n", "L_n^2 - 5 F_n^2 = 4(-1)^n", "M_2l = M_l (M_l + 2)"))


def ratio_series_figure(
    spec: OrbitSpec,
    n_max: int,
    beta_lines: Sequence[int] = (2,),
    mark_parity: bool = False,
    denominator: str = "loglog",
    tables: Sequence[FactorTable] = (),
    omega_budget: int = DEFAULT_BUDGET,
    title: str | None = None,
) -> FigureDataset:
    """Sequence index against the Omega ratio, with beta_k reference lines.

    The series starts at the first point where log log|xy| exceeds
    FIGURE_LOGLOG_FLOOR (or n >= 2 for the log n denominator).
    """
    pts: list[FigurePoint] = []
    started = False
    if n_max >= 0:
        for p in iterate_orbit(spec, n_max, omega_budget, tables, denominator=denominator):
            if p.ratio is None:
                continue
            if not started:
                if math.log(math.log(abs(p.f_value))) <= FIGURE_LOGLOG_FLOOR:
                    continue
                started = True
            idx = p.n + spec.index_offset
            marker = ("even" if idx % 2 == 0 else "odd") if mark_parity else "all"
            pts.append(FigurePoint(idx, p.ratio, marker, p.omega.value, p.omega.exact))
    lines = [ReferenceLine(f"beta_{k}", solve_beta(k).beta) for k in beta_lines]
    ylabel = "Omega(xy) / log log|xy|" if denominator == "loglog" else "Omega(xy) / log n"
    return FigureDataset(
        title=title or f"{spec.label or 'orbit'} ratio series",
        ylabel=ylabel,
        points=pts,
        lines=lines,
        metadata={
            "orbit": spec.label,
            "n_max": n_max,
            "denominator": denominator,
            "protocol": "composites with no known factor count as two primes",
            "unresolved": sum(not p.exact for p in pts),
        },
    )
