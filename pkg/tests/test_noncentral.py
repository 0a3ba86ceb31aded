import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extreme_wishart import (
    Diagnostics,
    DomainError,
    NoConvergence,
    NoncentralWishartModel,
    NotPositiveDefinite,
    NotRankOne,
    PrecisionLoss,
    SeriesOptions,
    UnsupportedShape,
)
from extreme_wishart import noncentral as nc
from extreme_wishart.montecarlo import CdfCurve, RngSpec, sample_central_wishart_eigs, sup_distance
from extreme_wishart.presets import fig_covariance, rank_one_mean

from conftest import fig1_model, random_pd

GRID = np.linspace(0.0, 5.0, 21)


def _central(model, x):
    return 1.0 - math.exp(-x * model.sigma_inv.trace())


def _tiny(m, n, eta=1e-8):
    base = fig1_model(m, n)
    return NoncentralWishartModel(fig_covariance(m), rank_one_mean(n, m) * math.sqrt(eta / base.eta))


# --- model ----------------------------------------------------------------

@pytest.mark.parametrize("m,n", [(2, 2), (2, 4), (3, 4)])
def test_model_invariants(m, n):
    model = fig1_model(m, n)
    assert model.eta > 0 and model.mu > 0
    ts = model.theta @ model.sigma_inv.entries
    assert np.allclose(ts, ts.conj().T, atol=1e-12)
    assert np.allclose(ts, model.mu * np.outer(model.alpha, model.alpha.conj()), atol=1e-12)
    ups = np.asarray(model.upsilon)
    assert model.eta == pytest.approx(np.trace(model.sigma_inv.entries @ ups.conj().T @ ups).real)
    assert model.tr_theta_sigma == pytest.approx(np.linalg.norm(ups) ** 2)
    assert model.mu_over_eta == pytest.approx(model.mu / model.eta)


def test_model_rejections():
    with pytest.raises(NotRankOne):
        NoncentralWishartModel(fig_covariance(2), np.zeros((3, 2)))
    with pytest.raises(NotRankOne):
        NoncentralWishartModel(fig_covariance(2), np.eye(3, 2))
    with pytest.raises(DomainError):
        NoncentralWishartModel(fig_covariance(3), rank_one_mean(2, 3))
    with pytest.raises(NotPositiveDefinite):
        NoncentralWishartModel(np.array([[1.0, 2.0], [2.0, 1.0]]), rank_one_mean(2, 2))


# --- minimum --------------------------------------------------------------

@pytest.mark.parametrize("fn,m,n", [(nc.min_cdf_square, 2, 2), (nc.min_cdf_square, 3, 3),
                                    (nc.min_cdf_2col, 2, 3), (nc.min_cdf_3x2, 2, 3),
                                    (nc.min_cdf_4x2, 2, 4), (nc.min_cdf_4x3, 3, 4)])
def test_min_at_zero(fn, m, n):
    assert fn(fig1_model(m, n), 0.0) == 0.0


def test_min_unsupported_shape():
    with pytest.raises(UnsupportedShape, match="supported"):
        nc.min_cdf(fig1_model(3, 5), 1.0)


def test_min_dispatch_paths_agree():
    model = fig1_model(2, 3)
    for x in GRID:
        assert nc.min_cdf(model, x) == pytest.approx(nc.min_cdf_3x2(model, x), abs=1e-10)
        assert nc.min_cdf(model, x) == pytest.approx(nc.min_cdf_2col(model, x), abs=1e-10)


def test_literal_theorem_matches_square_case():
    model = fig1_model(2, 2)
    for x in GRID:
        lit = nc.min_cdf_2col(model, x, resum=False)
        assert lit == pytest.approx(nc.min_cdf_square(model, x), abs=1e-10)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_literal_and_resummed_agree(n):
    model = fig1_model(2, n)
    for x in GRID:
        assert nc.min_cdf_2col(model, x, resum=False) == pytest.approx(nc.min_cdf_2col(model, x), abs=1e-11)


def test_rho_weights_reproduce_rho():
    model = fig1_model(2, 5)
    for x in (0.3, 2.0, 4.5):
        weights = nc.rho_weights(model, x)
        for t in range(8):
            rho = nc._rho_row(model, x, t)
            fit = sum(w * math.prod(range(b, b + t)) for w, b in weights)
            assert fit == pytest.approx(rho, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("fn,m,n", [(nc.min_cdf_square, 2, 2), (nc.min_cdf_square, 3, 3),
                                    (nc.min_cdf_3x2, 2, 3), (nc.min_cdf_4x2, 2, 4),
                                    (nc.min_cdf_4x3, 3, 4)])
def test_phi3_forms(fn, m, n):
    model = fig1_model(m, n)
    for x in GRID:
        assert fn(model, x, use_phi3=True) == pytest.approx(fn(model, x), abs=1e-10)


def test_printed_four_by_two_weights_are_inconsistent():
    model = fig1_model(2, 4)
    bad = []
    for x in GRID[1:]:
        try:
            bad.append(abs(nc.min_cdf_4x2(model, x, variant="statement") - nc.min_cdf_2col(model, x)))
        except PrecisionLoss:
            bad.append(math.inf)
    assert max(bad) > 1e-4
    assert nc.FOUR_BY_TWO_VARIANTS == ("derived", "statement")


@pytest.mark.parametrize("m", [2, 3])
def test_small_eta_square_reduces_to_central(m):
    # W_m(m, Sigma): P(lambda_min > x) = etr(-x Sigma^-1)
    model = _tiny(m, m)
    assert model.eta == pytest.approx(1e-8)
    for x in (0.1, 0.7, 2.0, 4.0):
        assert nc.min_cdf(model, x) == pytest.approx(_central(model, x), abs=1e-6)


def test_small_eta_corollaries_match_general_series():
    for n, fn in ((3, nc.min_cdf_3x2), (4, nc.min_cdf_4x2)):
        model = _tiny(2, n)
        for x in (0.1, 1.0, 3.0):
            assert fn(model, x) == pytest.approx(nc.min_cdf_2col(model, x), abs=1e-10)


@pytest.mark.parametrize("m,n", [(2, 3), (3, 4)])
def test_small_eta_matches_central_wishart_simulation(m, n):
    model = _tiny(m, n)
    emp = sample_central_wishart_eigs(model.sigma, n, "min", 100_000, RngSpec(5))
    grid = np.linspace(0, emp.quantile(0.999), 41)
    curve = CdfCurve(grid, [nc.min_cdf(model, x) for x in grid])
    assert sup_distance(curve, emp) < 0.01


@pytest.mark.parametrize("m,n", [(2, 2), (2, 3), (3, 4)])
@pytest.mark.parametrize("c", [0.3, 2.5])
def test_scale_equivariance(m, n, c):
    model = fig1_model(m, n)
    scaled = model.scaled(c)
    assert scaled.eta == pytest.approx(model.eta, rel=1e-12)
    for x in (0.2, 1.1, 3.0):
        assert nc.min_cdf(scaled, c * x) == pytest.approx(nc.min_cdf(model, x), abs=1e-11)
    if m == 2:
        assert nc.max_cdf(scaled, c * x) == pytest.approx(nc.max_cdf(model, x), abs=1e-11)


@pytest.mark.parametrize("m,n", [(2, 2), (3, 3), (2, 3), (2, 4), (3, 4)])
def test_monotone_and_in_range(m, n):
    model = fig1_model(m, n)
    xs = np.linspace(0, 8, 81)
    vals = np.array([nc.min_cdf(model, x) for x in xs])
    assert np.all(np.diff(vals) >= -1e-10)
    assert np.all((vals >= 0) & (vals <= 1))


def test_min_tends_to_one():
    model = fig1_model(2, 2)
    assert nc.min_cdf(model, 25.0) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.05, 6.0))
def test_random_models_min_between_central_and_one(seed, x):
    rng = np.random.default_rng(seed)
    sigma = random_pd(rng, 2)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    w = rng.normal(size=2) + 1j * rng.normal(size=2)
    model = NoncentralWishartModel(sigma, np.outer(v, w) * 0.5)
    f = nc.min_cdf(model, x)
    assert 0.0 <= f <= 1.0
    assert nc.max_cdf(model, x) <= f + 1e-10


def test_diagnostics_record_terms_and_cap():
    model = fig1_model(2, 4)
    diag = Diagnostics()
    nc.min_cdf(model, 3.0, diag=diag)
    assert 0 < diag.max_terms <= 30
    with pytest.raises(NoConvergence):
        nc.min_cdf(model, 3.0, SeriesOptions(max_terms=6))


# --- maximum --------------------------------------------------------------

def test_max_small_x_and_zero():
    model = fig1_model(2, 3)
    assert nc.max_cdf(model, 0.0) == 0.0
    assert nc.max_cdf(model, 1e-3) < 1e-15


def test_max_unsupported():
    with pytest.raises(UnsupportedShape):
        nc.max_cdf(fig1_model(3, 4), 1.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_max_below_min(n):
    model = fig1_model(2, n)
    for x in GRID:
        assert nc.max_cdf(model, x) <= nc.min_cdf(model, x) + 1e-12


@pytest.mark.parametrize("n", [2, 3, 6])
def test_max_monotone(n):
    model = fig1_model(2, n)
    vals = [nc.max_cdf(model, x) for x in np.linspace(0, 12, 61)]
    assert np.all(np.diff(vals) >= -1e-10)
    assert vals[-1] <= 1.0


def _mp_max_cdf(model, x, terms):
    """50-digit reference: Taylor coefficients of the determinant form by mpmath."""
    mpmath.mp.dps = 50
    n = model.n
    x = mpmath.mpf(x)
    a = mpmath.matrix((model.sigma_inv.entries * -float(x)).tolist())
    b = mpmath.matrix(model.projector.entries.tolist())

    def eig(y, s):
        mat = a + b * y
        tr = mat[0, 0] + mat[1, 1]
        det = mat[0, 0] * mat[1, 1] - mat[0, 1] * mat[1, 0]
        return (tr + s * mpmath.sqrt(tr**2 - 4 * det)) / 2

    def phi(y):
        x1, x2 = eig(y, 1), eig(y, -1)
        f = mpmath.hyp1f1
        return (x1 * f(n, n + 2, x1) * f(n - 1, n + 1, x2) - x2 * f(n, n + 2, x2) * f(n - 1, n + 1, x1)) / (x1 - x2)

    coeffs = mpmath.taylor(phi, 0, terms)
    xm = x * mpmath.mpf(model.mu)
    series = mpmath.fsum(xm**k / mpmath.rf(n, k) * mpmath.re(coeffs[k]) for k in range(terms + 1))
    pre = x ** (2 * n) * mpmath.exp(-mpmath.mpf(model.eta)) / (
        mpmath.factorial(n) * mpmath.factorial(n + 1) * mpmath.mpf(model.sigma.det()) ** n)
    return float(pre * series)


@pytest.mark.parametrize("x,terms", [(2.0, 30), (6.0, 45)])
def test_max_series_vs_high_precision(x, terms):
    # guards the jet recursion against loss of precision at high order
    model = fig1_model(2, 3)
    ref = _mp_max_cdf(model, x, terms)
    assert nc.max_cdf(model, x) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("x", [1e-300, 1e-38, 1e-8])
def test_max_tiny_x_is_finite(x):
    # the eigenvalue gap of -x Sigma^-1 is O(x); the series must not overflow
    for n in (2, 4):
        val = nc.max_cdf(fig1_model(2, n), x)
        assert 0.0 <= val < 1e-30
