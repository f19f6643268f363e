import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from rmt_lab.scalartails import (DEFAULT_GRID, MomentProfile, TailBoundParams, bernoulli_profile,
                                 bernstein_bound, bernstein_crossover, bernstein_exponent,
                                 center_shift, constant_profile, empirical_tail,
                                 exponential_profile, fit_subgaussian_tail_constant,
                                 hoeffding_bound, khintchine_monte_carlo, khintchine_sandwich,
                                 normal_profile, profile_from_samples, psi1_norm, psi2_norm,
                                 uniform_profile)
from rmt_lab.seeding import SeedSpec, standard_normal


def test_psi2_bernoulli():
    assert psi2_norm(bernoulli_profile()) == 1.0


def test_psi2_bounded_by_sup():
    prof = profile_from_samples(np.array([0.5, -2.0, 1.0, 1.5]))
    assert psi2_norm(prof) <= 2.0


def test_psi2_normal_against_gamma_oracle():
    grid = (1.0, 2.0, 4.0, 8.0, 16.0)
    prof = normal_profile(grid)
    oracle = [math.sqrt(2) * (special.gamma((1 + p) / 2) / special.gamma(0.5)) ** (1 / p)
              for p in grid]
    assert np.allclose(prof.moments, oracle, rtol=1e-13)
    assert abs(prof.moments[0] - math.sqrt(2 / math.pi)) < 1e-15
    assert psi2_norm(prof) == max(m / math.sqrt(p) for p, m in zip(grid, oracle)) or \
        abs(psi2_norm(prof) - max(m / math.sqrt(p) for p, m in zip(grid, oracle))) < 1e-14
    # scipy's normal moments as a second oracle at p = 4: E Z^4 = 3
    assert abs(prof.moments[2] ** 4 - stats.norm.moment(4)) < 1e-12


def test_psi1_examples():
    assert psi1_norm(exponential_profile((1.0, 2.0, 4.0, 8.0))) == pytest.approx(1.0, abs=1e-15)
    assert psi1_norm(constant_profile(0.0)) == 0.0
    sq = constant_profile(1.0)            # X^2 for symmetric signs
    psi2 = psi2_norm(bernoulli_profile())
    assert psi2 ** 2 <= psi1_norm(sq) <= 2 * psi2 ** 2


def test_exponential_profile_decreasing_ratio():
    prof = exponential_profile((1.0, 2.0, 4.0, 8.0))
    r = [m / p for p, m in zip(prof.p_grid, prof.moments)]
    assert all(b < a for a, b in zip(r, r[1:]))


def test_profile_validation():
    with pytest.raises(ValueError):
        MomentProfile((1.0, 2.0, 4.0), (1.0, 1.0, 1.0), "analytic(x)")
    with pytest.raises(ValueError):
        MomentProfile((1.0, 2.0, 4.0, 8.0), (1.0, -1.0, 1.0, 1.0), "analytic(x)")
    with pytest.raises(ValueError):
        MomentProfile((2.0, 1.0, 4.0, 8.0), (1.0,) * 4, "analytic(x)")


def test_profile_csv_round_trip(tmp_path):
    prof = normal_profile()
    prof.to_csv(tmp_path / "p.csv")
    back = MomentProfile.from_csv(tmp_path / "p.csv")
    assert back.p_grid == prof.p_grid and back.moments == prof.moments
    assert back.source == "analytic(normal)"
    assert (tmp_path / "p.csv").read_text().splitlines()[0] == "p,moment,source"


def test_hoeffding_examples():
    p = TailBoundParams(K=1.0, a=(1.0,), c=0.25)
    assert hoeffding_bound(p, 0.0) == 1.0
    assert hoeffding_bound(p, 4.0) == pytest.approx(math.e * math.exp(-4), rel=1e-14)
    assert hoeffding_bound(p, 4.0) == pytest.approx(0.0498, abs=5e-5)
    # doubling t=2 divides the bound by e^{3 c t^2}
    ratio = hoeffding_bound(p, 4.0) / hoeffding_bound(p, 2.0)
    assert ratio == pytest.approx(math.exp(-3 * 0.25 * 4), rel=1e-12)


def test_bernstein_examples():
    p = TailBoundParams(K=1.0, a=(1.0,) * 8, c=1.0)
    assert bernstein_bound(p, 0.0) == 1.0
    assert bernstein_bound(p, 0.5 * 8) == pytest.approx(2 * math.exp(-2), rel=1e-14)
    assert bernstein_bound(p, 4.0) == pytest.approx(0.2707, abs=5e-5)
    assert bernstein_crossover(TailBoundParams(1.0, (1.0,) * 4)) == 4.0


def test_bernstein_subgaussian_branch_below_crossover():
    # spread-out coefficients: |a|_inf small at fixed |a|_2 = 1
    n = 400
    p = TailBoundParams(1.0, tuple([1 / math.sqrt(n)] * n))
    tstar = bernstein_crossover(p)
    for t in np.linspace(0, tstar * 0.999, 25):
        expo, branch = bernstein_exponent(p, t)
        assert branch == "subgaussian" and expo == pytest.approx(-p.c * t * t, abs=1e-12)
    assert bernstein_exponent(p, 2 * tstar)[1] == "subexponential"


def test_tail_params_validation():
    with pytest.raises(ValueError):
        TailBoundParams(0.0, (1.0,))
    with pytest.raises(ValueError):
        TailBoundParams(1.0, (0.0, 0.0))
    with pytest.raises(ValueError):
        TailBoundParams(1.0, (1.0,), c=0.0)
    with pytest.raises(ValueError):
        hoeffding_bound(TailBoundParams(1.0, (1.0,)), -1.0)


def _brute_lp(a, p):
    import itertools
    tot = [abs(sum(s * x for s, x in zip(signs, a))) ** p
           for signs in itertools.product((-1, 1), repeat=len(a))]
    return (sum(tot) / len(tot)) ** (1 / p)


def test_khintchine_examples():
    s = khintchine_sandwich([1.0], 6)
    assert s.exact == 1.0 == s.lower
    s = khintchine_sandwich([1.0, 1.0], 2)
    assert s.exact == pytest.approx(math.sqrt(2), rel=1e-15) and s.lower == pytest.approx(s.exact)
    s = khintchine_sandwich([1.0, 1.0], 4)
    assert s.exact == pytest.approx(8 ** 0.25, rel=1e-14)
    assert s.lower <= s.exact <= s.upper_form
    assert s.upper_form == pytest.approx(2 * math.sqrt(2))


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=8),
       st.sampled_from([2, 4, 6, 8]))
@settings(max_examples=60, deadline=None)
def test_khintchine_matches_itertools(a, p):
    if np.linalg.norm(a) == 0:
        return
    s = khintchine_sandwich(a, p)
    assert s.exact == pytest.approx(_brute_lp(a, p), rel=1e-10)
    assert s.exact >= s.lower * (1 - 1e-12)
    if p == 2:
        assert s.exact == pytest.approx(s.lower, rel=1e-12)
    assert s.constant <= 3


def test_khintchine_strict_above_p2():
    s = khintchine_sandwich([1.0, 2.0, 3.0], 4)
    assert s.exact > s.lower * (1 + 1e-6)


def test_khintchine_errors_and_mc():
    with pytest.raises(ValueError):
        khintchine_sandwich(np.ones(21), 4)
    with pytest.raises(ValueError):
        khintchine_sandwich([1.0], 3)
    mc = khintchine_monte_carlo(np.ones(21), 4, 20000, SeedSpec(1))
    # E (sum of 21 signs)^4 = 3 * 21^2 - 2 * 21
    assert mc == pytest.approx((3 * 21 ** 2 - 2 * 21) ** 0.25, rel=0.03)


def test_empirical_tail_examples():
    s = [1.0, -1.0, 1.0, -1.0]
    assert empirical_tail(s, [0.5, 1.0]) == [(0.5, 1.0), (1.0, 0.0)]
    z = standard_normal(SeedSpec(3).generator(), 100_000)
    (t, frac), = empirical_tail(z, [2.0])
    oracle = math.erfc(2 / math.sqrt(2))
    assert abs(oracle - 2 * stats.norm.sf(2)) < 1e-15
    assert abs(frac - oracle) <= 0.01


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=50))
def test_empirical_tail_monotone(x):
    grid = np.linspace(0, 10, 11)
    vals = [f for _, f in empirical_tail(x, grid)]
    assert all(0 <= v <= 1 for v in vals)
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_center_shift_examples():
    prof = normal_profile()
    assert center_shift(prof, 0.0) is prof
    z = center_shift(constant_profile(1.0), 1.0)
    assert psi2_norm(z) == 0.0 <= 2 * psi2_norm(constant_profile(1.0))
    x = profile_from_samples(np.array([0.0, 2.0] * 500))
    assert psi2_norm(center_shift(x, 1.0)) == 1.0
    with pytest.raises(ValueError):
        center_shift(normal_profile(), 0.3)


@pytest.mark.parametrize("kind", ["gaussian", "bernoulli", "uniform"])
def test_fitted_tail_constant_bracket(kind):
    rng = SeedSpec(11).generator()
    if kind == "gaussian":
        x = standard_normal(rng, 20000)
    elif kind == "bernoulli":
        x = np.where(rng.random(20000) < 0.5, -1.0, 1.0)
    else:
        x = math.sqrt(3) * (2 * rng.random(20000) - 1)
    c = fit_subgaussian_tail_constant(x, np.linspace(0.25, 4, 16))
    assert 0.05 <= c <= 2


def test_norms_monotone_in_profile():
    lo = uniform_profile(1.0)
    hi = MomentProfile(lo.p_grid, tuple(m * 1.5 for m in lo.moments), "analytic(scaled)")
    assert psi2_norm(hi) >= psi2_norm(lo) and psi1_norm(hi) >= psi1_norm(lo)


def test_default_grid():
    assert DEFAULT_GRID == (1.0, 2.0, 4.0, 8.0, 16.0)
