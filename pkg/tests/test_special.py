import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extreme_wishart import NoConvergence, SeriesOptions
from extreme_wishart.special import (
    elem_sym_cos2,
    elem_sym_cos2_tau,
    gegenbauer,
    gegenbauer_scaled,
    gen_pochhammer,
    kummer_1f1,
    kummer_1f1_fixed,
    ln_pochhammer,
    mv_gamma,
    mv_gamma_ln,
    phi3,
    phi3_resummed,
    pochhammer,
    power_difference_quotient,
    signed_ln_pochhammer,
)

mpmath.mp.dps = 40


def test_pochhammer_examples():
    assert pochhammer(3, 0) == 1
    assert pochhammer(2, 3) == 24
    assert gen_pochhammer(-2, (1, 1)) == 6


def test_ln_pochhammer_no_overflow():
    # (1)_200 = 200! overflows a double
    assert ln_pochhammer(1.0, 200) == pytest.approx(float(mpmath.loggamma(201)), rel=1e-14)
    assert signed_ln_pochhammer(-3, 5) == (0, -math.inf)
    sign, val = signed_ln_pochhammer(-2.5, 3)  # (-2.5)(-1.5)(-0.5) < 0
    assert sign == -1 and val == pytest.approx(math.log(1.875))


def test_mv_gamma_examples():
    assert mv_gamma_ln(1, 1) == 0
    assert mv_gamma_ln(2, 2) == pytest.approx(math.log(math.pi))
    assert mv_gamma_ln(3, 4) == pytest.approx(math.log(12 * math.pi**3))
    assert mv_gamma(3, 4) == pytest.approx(12 * math.pi**3)


def test_kummer_identities():
    assert kummer_1f1(3, 3, 1.7) == pytest.approx(math.exp(1.7), rel=1e-14)
    assert kummer_1f1(2.5, 4, 0.0) == 1.0


@pytest.mark.parametrize("a,b,z", [(2, 4, 1), (3, 5, 12.0), (2, 4, -9.5), (4, 6, 25.0), (0.5, 1.5, -3.0)])
def test_kummer_vs_mpmath(a, b, z):
    assert kummer_1f1(a, b, z) == pytest.approx(float(mpmath.hyp1f1(a, b, z)), rel=1e-12)


def test_kummer_vs_fixed_truncation():
    # brute force: 400 terms of the raw series
    assert kummer_1f1(2, 4, 1) == pytest.approx(kummer_1f1_fixed(2, 4, 1, 400), rel=1e-14)


def test_kummer_terminating_polynomial():
    # 1F1(-2; 1; z) = 1 - 2z + z^2/2
    z = 1.3
    assert kummer_1f1(-2, 1, z) == pytest.approx(1 - 2 * z + z * z / 2, rel=1e-14)


def test_kummer_cap_raises():
    with pytest.raises(NoConvergence):
        kummer_1f1(2, 3, 50.0, SeriesOptions(max_terms=10))


def test_phi3_examples():
    assert phi3(2, 3, 0, 0) == 1
    assert phi3(2, 2, 0.9, 0) == pytest.approx(math.exp(0.9), rel=1e-14)
    assert phi3(3, 3, 1.1, 0.4) == pytest.approx(phi3_resummed(3, 3, 1.1, 0.4), rel=1e-13)


def _phi3_mp(b, c, x, y, terms=120):
    return float(mpmath.nsum(lambda t, k: mpmath.rf(b, t) * x**t * y**k
                             / (mpmath.rf(c, t + k) * mpmath.factorial(t) * mpmath.factorial(k)),
                             [0, terms], [0, terms]))


@pytest.mark.parametrize("b,c,x,y", [(2, 3, 1.5, 2.0), (3, 4, 6.0, 4.0), (2, 2, 9.0, 7.5)])
def test_phi3_vs_mpmath(b, c, x, y):
    assert phi3(b, c, x, y) == pytest.approx(_phi3_mp(b, c, x, y), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 10), st.floats(0, 5), st.integers(2, 4))
def test_adaptive_vs_fixed_20_terms_on_plotted_range(eta, xmu, n):
    # the plotted range (x in [0, 5], eta <= 10) is where 20 fixed terms suffice
    fixed = sum(kummer_1f1_fixed(n, n + k, eta, 200) * xmu**k / (math.factorial(k) * pochhammer(n, k))
                for k in range(20))
    got = phi3_resummed(n, n, eta, xmu)
    assert got == pytest.approx(fixed, rel=1e-10)
    assert kummer_1f1(n, n + 1, eta) == pytest.approx(kummer_1f1_fixed(n, n + 1, eta, 200), rel=1e-10)


def test_gegenbauer_examples():
    assert gegenbauer(0, 2.5, 1.3) == 1
    assert gegenbauer(1, 2.5, 1.3) == pytest.approx(6.5)
    for n in range(9):
        for z in (0.3, 1.7, -2.2):
            v = gegenbauer(n, 3.5, z)
            assert gegenbauer(n, 3.5, -z) == pytest.approx((-1) ** n * v, rel=1e-13, abs=1e-300)


@pytest.mark.parametrize("n,nu,x", [(4, 2.5, 0.7), (7, 3.0, 1.4), (10, 4.5, -0.3)])
def test_gegenbauer_vs_mpmath(n, nu, x):
    assert gegenbauer(n, nu, x) == pytest.approx(float(mpmath.gegenbauer(n, nu, x)), rel=1e-12)


def _inside_radius(beta, r):
    # the series converges for |r| below |beta| - sqrt(beta^2 - 1) when |beta| > 1
    radius = abs(beta) - math.sqrt(beta * beta - 1) if abs(beta) > 1 else 1.0
    return abs(r) < radius


GF_POINTS = [(nu, beta, r) for nu in (2.0, 3.5) for beta in (-2.0, -0.5, 0.0, 1.0, 2.0)
             for r in (-0.3, -0.2, 0.1, 0.2, 0.3) if _inside_radius(beta, r)]


@pytest.mark.parametrize("nu,beta,r", GF_POINTS)
def test_gegenbauer_generating_function(nu, beta, r):
    series = sum(gegenbauer(n, nu, beta) * r**n for n in range(250))
    assert series == pytest.approx((1 - 2 * beta * r + r * r) ** (-nu), rel=1e-8)


def test_gegenbauer_scaled_matches_plain():
    for n in range(8):
        s, d = 3.1, 0.8
        plain = d ** (n / 2) * gegenbauer(n, 2.5, s / (2 * math.sqrt(d)))
        assert gegenbauer_scaled(n, 2.5, s, d) == pytest.approx(plain, rel=1e-12)
    # finite at d = 0: C_n^nu(z) ~ (nu)_n (2z)^n / n!
    assert gegenbauer_scaled(3, 2.0, 1.5, 0.0) == pytest.approx(pochhammer(2.0, 3) * 1.5**3 / 6)


def test_elem_sym_cos2_examples():
    assert list(elem_sym_cos2(2)) == [1]
    assert np.allclose(elem_sym_cos2(4), [1, 0.5])
    c1, c2 = math.cos(math.pi / 5) ** 2, math.cos(2 * math.pi / 5) ** 2
    assert np.allclose(elem_sym_cos2(5), [1, c1 + c2, c1 * c2])
    assert np.allclose(elem_sym_cos2_tau(3, 3), elem_sym_cos2(4))
    assert list(elem_sym_cos2_tau(1, 2)) == [1]
    assert np.allclose(elem_sym_cos2_tau(3, 4), [1, 0.25])


def test_power_difference_identity_1000_pairs():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        x1, x2 = rng.uniform(0, 10, size=2)
        n = int(rng.integers(2, 11))
        exact = sum(x1 ** (n - 1 - j) * x2**j for j in range(n))
        got = power_difference_quotient(n, x1 + x2, x1 * x2)
        worst = max(worst, abs(got - exact) / exact)
    assert worst < 1e-12
