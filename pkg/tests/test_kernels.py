import math

import numpy as np
import pytest

from extreme_wishart import DegenerateEigenvalues, DomainError, HermitianMatrix
from extreme_wishart.kernels import (
    c110,
    incomplete_gamma_prefactor,
    incomplete_trace_integral,
    lemma_2x2_trace_powers,
    lemma_c110_integral,
    lemma_trace_integral,
    lemma_two_trace,
    matrix_1f1_a_a2,
    phi_derivatives,
    x_jets,
)
from extreme_wishart.oracles import mc_expectation_oracle, mc_region_oracle
from extreme_wishart.special import kummer_1f1, mv_gamma

from conftest import random_pd, random_rank_one

ZERO2 = HermitianMatrix(np.zeros((2, 2)))


def _tr(x):
    return np.trace(x, axis1=-2, axis2=-1).real


def _eig_fd(a, b, y):
    return np.linalg.eigvalsh(a.entries + y * b.entries)[::-1]


# --- x jets ---------------------------------------------------------------

def test_x_jets_zero_b():
    j1, j2 = x_jets(HermitianMatrix.diag([1, 3]), ZERO2, 4)
    assert np.all(j1.coeffs[1:] == 0) and np.all(j2.coeffs[1:] == 0)


def test_x_jets_commuting_shift():
    j1, j2 = x_jets(HermitianMatrix.diag([1, 2]), HermitianMatrix.identity(2), 4)
    assert np.allclose(j1.coeffs, [2, 1, 0, 0, 0])
    assert np.allclose(j2.coeffs, [1, 1, 0, 0, 0])


def test_x_jets_vs_finite_differences(rng):
    h = 1e-3
    for _ in range(10):
        a, b = random_pd(rng, 2), random_pd(rng, 2, scale=0.5)
        jets = x_jets(a, b, 3)
        f = {k: _eig_fd(a, b, k * h) for k in (-2, -1, 0, 1, 2)}
        fd = [
            (f[1] - f[-1]) / (2 * h),
            (f[1] - 2 * f[0] + f[-1]) / h**2,
            (f[2] - 2 * f[1] + 2 * f[-1] - f[-2]) / (2 * h**3),
        ]
        for i in range(2):
            for j in range(3):
                want = fd[j][i]
                got = jets[i].derivative(j + 1)
                assert abs(got - want) <= 1e-5 * max(abs(want), 1.0)


def test_x_jets_degenerate():
    with pytest.raises(DegenerateEigenvalues):
        x_jets(HermitianMatrix.identity(2), HermitianMatrix.diag([1, 0]), 2)


# --- phi ------------------------------------------------------------------

def _phi_fd(a, b, a_par, y):
    return matrix_1f1_a_a2(HermitianMatrix(a.entries + y * b.entries), a_par)


def test_phi_value_is_determinant_form():
    a = HermitianMatrix.diag([0.7, -0.4])
    x1, x2, s = 0.7, -0.4, 3.0
    delta = x1 * kummer_1f1(s, s + 2, x1) * kummer_1f1(s - 1, s + 1, x2) - x2 * kummer_1f1(
        s, s + 2, x2) * kummer_1f1(s - 1, s + 1, x1)
    d = phi_derivatives(a, ZERO2, s, 0)
    assert d.values[0] == pytest.approx(delta / (x1 - x2), rel=1e-14)


def test_phi_zero_b_has_no_derivatives():
    d = phi_derivatives(HermitianMatrix.diag([0.2, -1.0]), ZERO2, 2.5, 4)
    assert np.all(d.values[1:] == 0)


def test_phi_at_zero_matrix_is_one():
    # 1F1~(a; a+2; 0) = 1
    assert matrix_1f1_a_a2(HermitianMatrix.diag([1e-12, -1e-12]), 3.0) == pytest.approx(1.0, abs=1e-10)


def test_phi_vs_finite_differences(rng):
    h = 1e-3
    for _ in range(6):
        a = random_pd(rng, 2) * -1.0
        b = random_rank_one(rng, 2)
        d = phi_derivatives(a, b, 3.0, 2).values
        f = {k: _phi_fd(a, b, 3.0, k * h) for k in (-1, 0, 1)}
        assert d[0] == pytest.approx(f[0], rel=1e-12)
        assert d[1] == pytest.approx((f[1] - f[-1]) / (2 * h), rel=1e-5)
        assert d[2] == pytest.approx((f[1] - 2 * f[0] + f[-1]) / h**2, rel=1e-5)


def test_phi_perturbation_policy():
    with pytest.warns(RuntimeWarning):
        d = phi_derivatives(HermitianMatrix.identity(2) * -1.0, HermitianMatrix.diag([1, 0]), 2.0, 2,
                            perturb=True)
    assert d.perturbed


# --- incomplete integral (region oracle) ------------------------------------

def test_incomplete_integral_zero_argument_limit():
    a = HermitianMatrix.diag([1e-10, -1e-10])
    got = incomplete_trace_integral(a, ZERO2, 2.0, 0)
    assert got == pytest.approx(mv_gamma(2, 2) ** 2 / mv_gamma(2, 4), rel=1e-8)
    assert got == pytest.approx(incomplete_gamma_prefactor(2.0), rel=1e-8)


def test_region_oracle_examples():
    mean, se = mc_region_oracle(ZERO2, ZERO2, 2.0, 0, samples=100_000, seed=1)
    want = mv_gamma(2, 2) ** 2 / mv_gamma(2, 4)
    assert abs(mean - want) < 3 * se
    # B = 0 gives exactly zero for p >= 1
    assert mc_region_oracle(HermitianMatrix.diag([0.5, 0.2]), ZERO2, 2.0, 1, samples=100)[0] == 0.0


@pytest.mark.parametrize("p,b_kind", [(0, "pd"), (1, "rank1"), (2, "pd")])
def test_incomplete_integral_vs_region_oracle(p, b_kind):
    a = HermitianMatrix.diag([0.5, 0.2])
    b = HermitianMatrix([[1.0, 0.3j], [-0.3j, 0.6]]) if b_kind == "pd" else HermitianMatrix.outer([1, 1j], 0.5)
    got = incomplete_trace_integral(a, b, 2.0, p)
    mean, se = mc_region_oracle(a, b, 2.0, p, samples=200_000, seed=7 + p)
    assert abs(got - mean) < 3 * se


# --- cone integrals (expectation oracle) -------------------------------------

def test_trace_integral_examples(rng):
    a, r = random_pd(rng, 3), random_rank_one(rng, 3)
    base = 3.0 * mv_gamma(3, 3) * a.det() ** -3 * a.inv().trace()
    assert lemma_trace_integral(a, r, 3.0, 0) == pytest.approx(base, rel=1e-13)
    assert lemma_trace_integral(HermitianMatrix.identity(2), HermitianMatrix.diag([1, 0]), 2.0, 1) == \
        pytest.approx(10 * math.pi, rel=1e-14)


def test_expectation_oracle_examples():
    eye = HermitianMatrix.identity(2)
    mean, se = mc_expectation_oracle(eye, 2, lambda x: np.ones(len(x)), samples=1000)
    assert mean == pytest.approx(mv_gamma(2, 2)) and se == 0
    mean, se = mc_expectation_oracle(eye, 2, _tr, samples=100_000, seed=3)
    assert abs(mean - 4 * mv_gamma(2, 2)) < 3 * se
    a = HermitianMatrix([[1.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.8]])
    mean, se = mc_expectation_oracle(a, 3, lambda x: _tr(x) ** 2, samples=100_000, seed=4)
    assert abs(mean - lemma_two_trace(a, eye * 0.0, 3, 0, 2)) < 3 * se


def test_trace_integral_vs_oracle(rng):
    for seed in range(3):
        a, r = random_pd(rng, 3), random_rank_one(rng, 3)
        got = lemma_trace_integral(a, r, 4, 2)
        mean, se = mc_expectation_oracle(a, 4, lambda x: _tr(x) * _tr(r.entries @ x) ** 2,
                                         samples=100_000, seed=seed)
        assert abs(got - mean) < 3 * se


def test_trace_powers_examples(rng):
    a, r = random_pd(rng, 2), random_rank_one(rng, 2)
    plain = 3 * 4 * mv_gamma(2, 3) * a.det() ** -3 * np.trace(r.entries @ a.inv().entries).real ** 2
    assert lemma_2x2_trace_powers(a, r, 3.0, 0, 2) == pytest.approx(plain, rel=1e-13)


@pytest.mark.parametrize("p,t", [(1, 0), (2, 2), (3, 1)])
def test_trace_powers_vs_oracle(rng, p, t):
    a, r = random_pd(rng, 2), random_rank_one(rng, 2)
    got = lemma_2x2_trace_powers(a, r, 3.0, p, t)
    mean, se = mc_expectation_oracle(a, 3, lambda x: _tr(x) ** p * _tr(r.entries @ x) ** t,
                                     samples=100_000, seed=p + 10 * t)
    assert abs(got - mean) < 3 * se


def test_c110_examples():
    eye, r = HermitianMatrix.identity(3), HermitianMatrix.diag([1, 0, 0])
    g = mv_gamma(3, 4)
    assert lemma_c110_integral(eye, r, 0) == pytest.approx(3 * g)
    assert lemma_c110_integral(eye, r, 1) == pytest.approx(11 * g)
    # the printed plus sign
    assert lemma_c110_integral(eye, r, 1, variant="statement") == pytest.approx(13 * g)
    assert c110(np.diag([1.0, 2.0, 3.0])) == pytest.approx(11.0)


def test_c110_vs_oracle(rng):
    a, r = random_pd(rng, 3), random_rank_one(rng, 3)
    for t in (1, 2):
        got = lemma_c110_integral(a, r, t)
        # |X|^(a-m) = 1 for a = m = 3
        mean, se = mc_expectation_oracle(
            a, 3, lambda x: _tr(r.entries @ x) ** t * np.array([c110(xi) for xi in x]),
            samples=60_000, seed=t)
        assert abs(got - mean) < 3 * se


def test_two_trace_examples(rng):
    a, b = random_pd(rng, 2), random_pd(rng, 2)
    assert lemma_two_trace(a, b, 3.0, 0, 0) == pytest.approx(mv_gamma(2, 3) * a.det() ** -3, rel=1e-13)


@pytest.mark.parametrize("p,t", [(0, 1), (2, 2), (1, 3)])
def test_two_trace_vs_oracle(rng, p, t):
    a, b = random_pd(rng, 2), random_pd(rng, 2, scale=0.7)
    got = lemma_two_trace(a, b, 3.0, p, t)
    mean, se = mc_expectation_oracle(a, 3, lambda x: _tr(b.entries @ x) ** p * _tr(x) ** t,
                                     samples=100_000, seed=100 + p + t)
    assert abs(got - mean) < 3 * se


def test_two_trace_statement_variant_differs(rng):
    a, b = random_pd(rng, 2), random_pd(rng, 2)
    assert lemma_two_trace(a, b, 3.0, 1, 2, variant="statement") != pytest.approx(
        lemma_two_trace(a, b, 3.0, 1, 2), rel=1e-3)


def test_domain_errors(rng):
    with pytest.raises(DomainError):
        lemma_trace_integral(random_pd(rng, 2), HermitianMatrix.identity(2), 2.0, 1)
    with pytest.raises(DomainError):
        lemma_c110_integral(random_pd(rng, 2), random_rank_one(rng, 2), 1)
    with pytest.raises(DomainError):
        phi_derivatives(HermitianMatrix.diag([1, 2]), ZERO2, 0.5, 1)
