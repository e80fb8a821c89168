"""Acceptance criteria 1-11, one test each, at the stated tolerances.

Each test records PASS/FAIL through the ``report`` fixture; the lines are
printed again in the terminal summary.
"""

import csv
import io
import math
import random
import time
from fractions import Fraction

from toralsieve import cli
from toralsieve.beta import beta_lambert, solve_beta
from toralsieve.model import ModelConfig, censored_count, empirical_vs_exact, run_liminf, run_nmax, tail_slope
from toralsieve.omega_stats import count_by_omega, nr_selberg, nu, selberg_band, single_draw_prob_exact
from toralsieve.orbits import OrbitIntegrityError, named_orbit, verify_identities
from toralsieve.sequences import fibonacci_lucas_upto, mersenne
from toralsieve.sporadic import naive_nmax, search_sigma
from toralsieve.surd_forms import (
    QuadForm,
    SurdSpec,
    automorph,
    cf_expand,
    convergents,
    pell_fundamental,
    surd_orbit_decomposition,
)


def _omega_trial(n: int) -> int:
    count, p = 0, 2
    while p * p <= n:
        while n % p == 0:
            n //= p
            count += 1
        p += 1
    return count + (n > 1)


def test_criterion_01_beta_table(report):
    t0 = time.perf_counter()
    published = {2: (0.373365, 5e-5), 3: (0.913728, 5e-5), 4: (1.52961, 5e-5), 5: (2.19252, 5e-5), 10: (5.8754, 5e-4)}
    errs = {k: abs(solve_beta(k).beta - v) for k, (v, _) in published.items()}
    ok_vals = all(errs[k] <= tol for k, (_, tol) in published.items())
    agree = max(abs(solve_beta(k).beta - beta_lambert(k)) for k in range(2, 51))
    elapsed = time.perf_counter() - t0
    ok = ok_vals and agree <= 1e-10 and elapsed < 1.0
    report(1, ok, f"max published err {max(errs.values()):.2e}, bisection/lambert {agree:.1e}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_exact_counts(report):
    small = count_by_omega(10)
    brute = [0] * 4
    for x in range(1, 11):
        brute[_omega_trial(x)] += 1
    ok_small = list(small.counts) == [1, 4, 4, 1] == brute
    ok_sums = all(sum(count_by_omega(T).counts) == T for T in (10**3, 10**5, 10**6))
    t0 = time.perf_counter()
    big = count_by_omega(10**7)
    elapsed = time.perf_counter() - t0
    ok = ok_small and ok_sums and sum(big.counts) == 10**7 and elapsed < 60
    report(2, ok, f"N_r(10)={list(small.counts)}, sieve 1e7 in {elapsed:.1f}s")
    assert ok


def test_criterion_03_nu(report):
    v1 = nu(1.0).value
    v0 = nu(1e-6).value
    consistent = []
    for z in (0.25, 0.5, 1.0, 1.4):
        a = nu(z, P=10**5)
        b = nu(z, P=4 * 10**5)
        consistent.append(abs(a.value - b.value) <= a.tail_bound)
    ok = abs(v1 - 1) <= 1e-9 and abs(v0 - 1) <= 1e-4 and all(consistent)
    report(3, ok, f"|nu(1)-1|={abs(v1 - 1):.1e}, |nu(1e-6)-1|={abs(v0 - 1):.1e}, P/4P {consistent}")
    assert ok


def test_criterion_04_selberg_band(report):
    T = 10**7
    table = count_by_omega(T)
    ratios = {}
    ok = True
    for r in (1, 2, 3, 4):
        ratio = table[r] / nr_selberg(T, r)
        lo, hi = selberg_band(T, r)
        ratios[r] = round(ratio, 4)
        ok &= lo <= ratio <= hi
    report(4, ok, f"ratios {ratios}")
    assert ok


def test_criterion_05_oracle_bridge(report):
    t0 = time.perf_counter()
    exact = single_draw_prob_exact(10, 2, 2)
    brute = sum(_omega_trial(a) + _omega_trial(b) <= 2 for a in range(1, 11) for b in range(1, 11))
    ok_exact = exact == Fraction(33, 100) == Fraction(brute, 100)
    worst = 0.0
    for T in (10**2, 10**4):
        for k in (1, 2, 3):
            for rec in empirical_vs_exact(T, k, list(range(k, k + 4)), 10**5, seed=2024):
                worst = max(worst, abs(rec.z))
    elapsed = time.perf_counter() - t0
    ok = ok_exact and worst <= 4.0 and elapsed < 120
    report(5, ok, f"P={exact}, worst |z|={worst:.2f}, {elapsed:.1f}s")
    assert ok


def test_criterion_06_tail_slope(report):
    config = ModelConfig(k=2, C=Fraction(105, 100), n_max=500, seed=1, R_list=(2,), trials=10**5)
    samples = run_nmax(config, 2)
    assert len(samples) == 10**5
    slope = tail_slope(samples, 20, 200)
    ok = slope is not None and -2.6 <= slope <= -1.4
    report(6, ok, f"slope={slope}, censored={censored_count(samples)}, no-event={sum(s.value == 0 for s in samples)}")
    assert ok


def test_criterion_07_orbit_identities(report):
    t0 = time.perf_counter()
    try:
        verify_identities(2000)
        ok_ids = True
    except OrbitIntegrityError:
        ok_ids = False
    fs, ls = [0, 1], [2, 1]
    while len(fs) < 4010:
        fs.append(fs[-1] + fs[-2])
        ls.append(ls[-1] + ls[-2])
    expect = {
        "fibonacci_lucas": lambda n: (fs[n + 1], ls[n + 1]),
        "consecutive_fibonacci": lambda n: (fs[n + 1], fs[n]),
        "consecutive_lucas": lambda n: (ls[n + 1], ls[n]),
        "even_fibonacci": lambda n: (fs[2 * n + 2], -fs[2 * n]),
        "consecutive_mersenne": lambda n: (2 ** (n + 1) - 1, 2**n - 1),
    }
    ok_orbits = all(
        (x, y) == expect[label](n) for label in expect for n, x, y in named_orbit(label).points(2000)
    )
    fs2, ls2 = fibonacci_lucas_upto(2000)
    ok_seq = list(fs2) == fs[:2001] and list(ls2) == ls[:2001] and mersenne(2000) == 2**2000 - 1
    elapsed = time.perf_counter() - t0
    ok = ok_ids and ok_orbits and ok_seq and elapsed < 10
    report(7, ok, f"identities {ok_ids}, orbits {ok_orbits}, {elapsed:.1f}s")
    assert ok


def test_criterion_08_sporadic(report):
    t0 = time.perf_counter()
    ff = search_sigma("FF", 1000)
    ll = search_sigma("LL", 1000)
    fl = search_sigma("FL", 1000)
    pred = naive_nmax(2, 2)
    elapsed = time.perf_counter() - t0
    ok = (
        ff.hits == (3, 5, 11, 431, 569)
        and ll.hits == (2, 5, 11, 17)
        and fl.hits == (4, 5, 7, 11, 13, 17, 47)
        and 211 <= pred <= 213
        and elapsed < 300
    )
    report(8, ok, f"FF {ff.hits}, LL {ll.hits}, FL {fl.hits}, nmax {pred:.2f}, {elapsed:.1f}s")
    assert ok


def _random_surds(count: int, seed: int):
    rnd = random.Random(seed)
    out = []
    while len(out) < count:
        D = rnd.randint(2, 2000)
        if math.isqrt(D) ** 2 == D:
            continue
        Q = rnd.choice([-1, 1]) * rnd.randint(1, 60)
        out.append(SurdSpec(rnd.randint(-50, 50), Q, D))
    return out


def test_criterion_09_surds_and_forms(report):
    cf = cf_expand(SurdSpec(0, 1, 2))
    conv = [(c.p, c.q) for c in convergents(cf, 60)]
    ok_conv = conv[:4] == [(1, 1), (3, 2), (7, 5), (17, 12)]
    ok_det = all(abs(p1 * q0 - p0 * q1) == 1 for (p0, q0), (p1, q1) in zip(conv, conv[1:]))
    ok_shift = True
    for s in _random_surds(20, seed=9):
        cfe = cf_expand(s)
        dec = surd_orbit_decomposition(cfe, n_check=400)
        cs = [(c.p, c.q) for c in convergents(cfe, 400 + dec.period_length)]
        for n in range(max(dec.first_index, 0), 401):
            if dec.gamma.apply(cs[n]) != cs[n + dec.period_length]:
                ok_shift = False
        ok_det &= all(abs(a * d - b * c) == 1 for (a, c), (b, d) in zip(cs, cs[1:]))
    form = QuadForm(1, 0, -5)
    g = automorph(form)
    ok_aut = [[int(e) for e in row] for row in g.rows()] == [[9, 20], [4, 9]]
    brute = next((t, u) for u in range(1, 100) for t in [math.isqrt(4 + 20 * u * u)] if t * t == 4 + 20 * u * u)
    ok_pell = pell_fundamental(20) == (18, 4) == brute
    rnd = random.Random(99)
    ok_pres = True
    for _ in range(100):
        v = (rnd.randint(-10**6, 10**6), rnd.randint(-10**6, 10**6))
        x, y = g.apply(v)
        ok_pres &= form(int(x), int(y)) == form(*v)
    ok = ok_conv and ok_det and ok_shift and ok_aut and ok_pell and ok_pres
    report(9, ok, f"conv {ok_conv}, det {ok_det}, shift {ok_shift}, automorph {ok_aut}, pell {ok_pell}, preserve {ok_pres}")
    assert ok


def test_criterion_10_figure_one(report, tmp_path):
    out = tmp_path / "fig1.csv"
    t0 = time.perf_counter()
    code = cli.run(["figure", "1", "--nmax", "300", "-o", str(out)])
    elapsed = time.perf_counter() - t0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    window = [float(r["ratio"]) for r in rows if 50 <= int(r["n"]) <= 300 and r["ratio"]]
    rmin = min(window)
    unresolved = sum(r["exact"] == "0" for r in rows)
    ok = code == 0 and 0.3 <= rmin <= 1.2
    report(10, ok, f"running min {rmin:.4f} over {len(window)} points, unresolved {unresolved}, {elapsed:.0f}s")
    assert ok


def test_criterion_11_liminf(report, tmp_path):
    k1 = run_liminf(ModelConfig(k=1, C=Fraction(103, 100), n_max=2000, seed=7))
    ok_k1 = any(r.omega <= 1 for r in k1.records)

    def series(cfg):
        return [r.running_min for r in run_liminf(cfg).records if r.running_min is not None]

    cfg2 = ModelConfig(k=2, C=3, n_max=39, seed=7)
    m2 = series(cfg2)
    ok_k2 = all(b <= a for a, b in zip(m2, m2[1:])) and all(v > 0 for v in m2)
    argv = ["model-run", "--k", "2", "--C", "3", "--nmax", "39", "--seed", "7", "-o"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    ok_repro = cli.run(argv + [str(a)]) == 0 == cli.run(argv + [str(b)])
    ok_repro &= a.read_bytes() == b.read_bytes()
    # at C=1.03 the first 23 draws are all 1, so only monotonicity is meaningful
    m2s = series(ModelConfig(k=2, C=Fraction(103, 100), n_max=300, seed=7))
    ok_small = all(b <= a for a, b in zip(m2s, m2s[1:])) and all(v >= 0 for v in m2s)
    ok = ok_k1 and ok_k2 and ok_repro and ok_small
    report(11, ok, f"k=1 hit {ok_k1}, k=2 min {m2[-1]:.3f} positive/monotone {ok_k2}, reproducible {ok_repro}")
    assert ok
