import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from toralsieve.surd_forms import (
    CFExpansion,
    QuadForm,
    SurdError,
    SurdSpec,
    automorph,
    cf_expand,
    convergents,
    is_squarefree,
    pell_fundamental,
    quadric_orbit_reps,
    solutions_in_box,
    surd_orbit_decomposition,
    surd_ratio_series,
)


def nonsquare(D: int) -> bool:
    return math.isqrt(D) ** 2 != D


surds = st.builds(
    SurdSpec,
    st.integers(-60, 60),
    st.integers(1, 40) | st.integers(-40, -1),
    st.integers(2, 3000).filter(nonsquare),
)


def test_known_expansions():
    assert cf_expand(SurdSpec(0, 1, 2)) == CFExpansion((1,), (2,))
    assert cf_expand(SurdSpec(0, 1, 3)) == CFExpansion((1,), (1, 2))
    assert cf_expand(SurdSpec(1, 2, 5)) == CFExpansion((), (1,))
    with pytest.raises(SurdError):
        SurdSpec(0, 1, 4)
    with pytest.raises(SurdError):
        SurdSpec(0, 0, 2)
    with pytest.raises(SurdError):
        CFExpansion((1,), ())


@given(surds)
def test_expansion_against_sympy(s):
    ref = sympy.continued_fraction_periodic(s.P, s.Q, s.D)
    period = tuple(ref[-1])
    pre = tuple(ref[:-1])
    cf = cf_expand(s)
    n = len(pre) + 3 * len(period)
    assert [cf.term(i) for i in range(n)] == [(list(pre) + list(period) * 3)[i] for i in range(n)]
    # minimal period
    assert len(cf.period) == len(period)


@given(surds, st.integers(0, 60))
def test_convergents_recurrence_and_determinant(s, n_max):
    cf = cf_expand(s)
    conv = list(convergents(cf, n_max))
    assert [c.n for c in conv] == list(range(n_max + 1))
    hp, hq = (1, 0), (cf.term(0), 1)
    for i, c in enumerate(conv):
        if i == 0:
            assert (c.p, c.q) == hq
        else:
            hp, hq = hq, (cf.term(i) * hq[0] + hp[0], cf.term(i) * hq[1] + hp[1])
            assert (c.p, c.q) == hq
            prev = conv[i - 1]
            assert c.p * prev.q - prev.p * c.q == (-1) ** (i + 1)
    mpmath.mp.dps = 120
    value = (s.P + mpmath.sqrt(s.D)) / s.Q
    assert abs(mpmath.mpf(conv[-1].p) / conv[-1].q - value) <= mpmath.mpf(1) / conv[-1].q ** 2


@given(surds)
def test_shift_property(s):
    cf = cf_expand(s)
    dec = surd_orbit_decomposition(cf, n_check=150)
    assert dec.gamma.is_integral
    assert abs(dec.gamma.det) == 1
    conv = [(c.p, c.q) for c in convergents(cf, 150 + dec.period_length)]
    k = max(dec.first_index, 0)
    for n in range(k, 151):
        assert dec.gamma.apply(conv[n]) == conv[n + dec.period_length]
    assert len(dec.reps) == dec.period_length


def test_sqrt2_decomposition():
    dec = surd_orbit_decomposition(cf_expand(SurdSpec(0, 1, 2)))
    assert dec.period_length == 1
    assert dec.gamma.apply((3, 2)) == (7, 5)
    assert dec.gamma.power(2).apply((3, 2)) == (17, 12)


def _pell_brute(D: int, u_max: int):
    for u in range(1, u_max + 1):
        t2 = D * u * u + 4
        if math.isqrt(t2) ** 2 == t2:
            return math.isqrt(t2), u
    return None


def test_pell_against_brute_force():
    for D in range(2, 501):
        if not nonsquare(D):
            continue
        t, u = pell_fundamental(D)
        assert t * t - D * u * u == 4 and t > 0 and u > 0
        brute = _pell_brute(D, 2000)
        if brute is not None:
            assert (t, u) == brute
        else:
            assert u > 2000


def test_pell_domain():
    for D in (0, -3, 9):
        with pytest.raises(ValueError):
            pell_fundamental(D)


def test_automorph_x2_minus_5y2():
    g = automorph(QuadForm(1, 0, -5))
    assert [[int(e) for e in r] for r in g.rows()] == [[9, 20], [4, 9]]
    assert pell_fundamental(20) == (18, 4)


forms = (
    st.tuples(st.integers(1, 12), st.integers(-12, 12), st.integers(-12, 12))
    .filter(lambda f: f[1] ** 2 - 4 * f[0] * f[2] > 0 and nonsquare(f[1] ** 2 - 4 * f[0] * f[2]))
    .map(lambda f: QuadForm(*f))
)
vectors = st.tuples(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))


@given(forms, st.lists(vectors, min_size=1, max_size=20))
def test_automorph_preserves_form(form, vs):
    g = automorph(form)
    assert g.det == 1 and g.is_integral
    for v in vs:
        x, y = g.apply(v)
        assert form(int(x), int(y)) == form(*v)


def test_form_validation():
    with pytest.raises(ValueError):
        QuadForm(1, 0, 1)
    with pytest.raises(ValueError):
        QuadForm(1, 0, -4)


@given(forms, st.integers(-30, 30), st.integers(0, 40))
def test_solutions_in_box_brute_force(form, t, h):
    brute = sorted((x, y) for x in range(-h, h + 1) for y in range(-h, h + 1) if form(x, y) == t)
    assert solutions_in_box(form, t, h) == brute


def test_quadric_orbits_norm_four():
    form = QuadForm(1, 0, -5)
    plus, minus = quadric_orbit_reps(form, 4, 2000, strict=False, both_signs=True)
    g = plus.gamma
    for res, t in ((plus, 4), (minus, -4)):
        members = [v for orb in res.orbits for v in orb]
        assert sorted(members) == solutions_in_box(form, t, 2000)
        for orb in res.orbits:
            assert orb[0] == min(orb)
            for v in orb:
                assert form(*v) == t
    # (2, 0) and (18, 8) = gamma (2, 0) fall in one group with their negatives
    group = next(orb for orb in plus.orbits if (2, 0) in orb)
    assert (-2, 0) in group and tuple(int(c) for c in g.apply((2, 0))) in group
    # (3, 1) and (1, 1) have norm 4 and -4 and lie in different classes
    assert (1, 1) in [v for orb in minus.orbits for v in orb]


def test_quadric_strictness():
    form = QuadForm(1, 0, -5)
    with pytest.raises(ValueError):
        quadric_orbit_reps(form, 4, 10)
    assert quadric_orbit_reps(form, 11, 100).reps
    assert is_squarefree(30) and not is_squarefree(12) and not is_squarefree(0)
    with pytest.raises(ValueError):
        quadric_orbit_reps(form, 11, -1)


def test_surd_ratio_series_sqrt2():
    ds = surd_ratio_series(SurdSpec(0, 1, 2), 60)
    assert len(ds.points) == 59
    assert ds.metadata["unresolved"] == 0
    assert ds.aux_label == "loglog_pq"
    p, q = 3363, 2378  # convergent n = 9
    pt = next(pt for pt in ds.points if pt.n == 9)
    om = sum(sympy.factorint(p).values()) + sum(sympy.factorint(q).values())
    assert pt.omega == om
    assert pt.ratio == pytest.approx(om / math.log(9))
    assert pt.aux == pytest.approx(math.log(math.log(p * q)))
    assert Fraction(p, q) == Fraction(3363, 2378)
