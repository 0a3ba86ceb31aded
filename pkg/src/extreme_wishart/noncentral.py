"""Extreme-eigenvalue c.d.f.s of correlated complex non-central Wishart matrices.

``W = X^H X`` with ``X ~ CN(Upsilon, I_n (x) Sigma)`` and rank-one
``Upsilon``. Every minimum-eigenvalue evaluator computes
``1 - P(W > x I)``, the maximum-eigenvalue one ``P(W < x I)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagnostics import Diagnostics, adaptive_sum, clamp_probability
from .errors import DomainError, NoConvergence, NotPositiveDefinite, NotRankOne, UnsupportedShape
from .hermitian import HermitianMatrix, as_hermitian, rank_one_factor
from .kernels import phi_derivatives
from .special import (
    DEFAULT_OPTIONS,
    SeriesOptions,
    gegenbauer,
    kummer_1f1,
    mv_gamma_ln,
    phi3,
    pochhammer,
)

SUPPORTED_MIN_SHAPES = "(m, m) for any m >= 2, (2, n) for any n >= 2, and (3, 4)"


@dataclass(frozen=True, eq=False)
class NoncentralWishartModel:
    """Model ``W_m(n, Sigma, Theta)`` with ``Theta = Sigma^-1 Upsilon^H Upsilon`` of rank one.

    Derived quantities: ``eta = tr(Theta)``, ``mu = tr(Theta Sigma^-1)`` and the
    unit vector ``alpha`` with ``Theta Sigma^-1 = mu alpha alpha^H``.
    """

    sigma: HermitianMatrix
    upsilon: np.ndarray
    m: int
    n: int
    sigma_inv: HermitianMatrix
    theta: np.ndarray
    eta: float
    mu: float
    alpha: np.ndarray
    tr_theta_sigma: float

    def __init__(self, sigma, upsilon, *, rank_tol: float = 1e-10):
        sigma = as_hermitian(sigma)
        ups = np.array(upsilon, dtype=complex)
        if ups.ndim != 2:
            raise DomainError("Upsilon must be an n x m matrix")
        n, m = ups.shape
        if m != sigma.dim:
            raise DomainError(f"Upsilon has {m} columns but Sigma is {sigma.dim} x {sigma.dim}")
        if m < 2 or n < m:
            raise DomainError(f"need n >= m >= 2, got m={m}, n={n}")
        if not sigma.is_positive_definite():
            raise NotPositiveDefinite("Sigma must be positive definite")
        gram = HermitianMatrix(ups.conj().T @ ups)
        if gram.norm == 0.0:
            raise NotRankOne("Upsilon = 0 is the central case; use a small non-zero mean instead")
        rank_one_factor(gram, rank_tol)
        sinv = sigma.inv()
        theta = sinv.entries @ gram.entries
        # mu and the direction come straight from Sigma^-1 G Sigma^-1
        mu, alpha = rank_one_factor(gram.congruence(sinv.entries), rank_tol)
        ups.setflags(write=False)
        theta.setflags(write=False)
        alpha.setflags(write=False)
        for name, value in (("sigma", sigma), ("upsilon", ups), ("m", m), ("n", n),
                            ("sigma_inv", sinv), ("theta", theta),
                            ("eta", float(np.trace(theta).real)), ("mu", float(mu)),
                            ("alpha", alpha), ("tr_theta_sigma", gram.trace())):
            object.__setattr__(self, name, value)

    @property
    def mu_over_eta(self) -> float:
        return self.mu / self.eta

    @property
    def projector(self) -> HermitianMatrix:
        """``alpha alpha^H``."""
        return HermitianMatrix.outer(self.alpha)

    def scaled(self, c: float) -> NoncentralWishartModel:
        """Same ``Theta`` with ``Sigma -> c Sigma`` (``Upsilon -> sqrt(c) Upsilon``)."""
        return NoncentralWishartModel(self.sigma * c, np.asarray(self.upsilon) * math.sqrt(c))


def _check_x(x):
    x = float(x)
    if not x >= 0.0 or not math.isfinite(x):
        raise DomainError(f"x must be a finite non-negative number, got {x!r}")
    return x


def _envelope(model, x):
    """``exp(-eta) etr(-x Sigma^-1)``."""
    return math.exp(-model.eta - x * model.sigma_inv.trace())


def _floor(model, x):
    # stop once the remaining terms move F by less than rel_tol
    env = _envelope(model, x)
    return 1.0 / env if env > 0.0 else math.inf


def _weighted_1f1_series(model, x, n, weights, opts, diag, label):
    """``sum_k (x mu)^k / (k! (n)_k) sum_r w_r 1F1(b_r; n + k; eta)`` for ``weights = [(w_r, b_r)]``."""
    xm = x * model.mu

    def term(k):
        lead = 1.0 if k == 0 else xm**k / (math.factorial(k) * pochhammer(n, k))
        if lead == 0.0:
            return 0.0
        return lead * sum(w * kummer_1f1(b, n + k, model.eta, opts) for w, b in weights)

    total, used = adaptive_sum(term, opts, label, _floor(model, x))
    if diag is not None:
        diag.record(used)
    return total


def _weighted_phi3(model, x, n, weights, opts):
    return sum(w * phi3(b, n, model.eta, x * model.mu, opts) for w, b in weights)


def _finish(model, x, series, diag, label):
    return clamp_probability(1.0 - _envelope(model, x) * series, diag, label)


# ---------------------------------------------------------------------------
# minimum eigenvalue
# ---------------------------------------------------------------------------

def min_cdf_square(model: NoncentralWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
                   *, use_phi3: bool = False, diag: Diagnostics | None = None) -> float:
    """Minimum-eigenvalue c.d.f. for ``m = n``."""
    if model.m != model.n:
        raise UnsupportedShape(f"min_cdf_square needs m = n, got m={model.m}, n={model.n}")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    m = model.m
    if use_phi3:
        series = _weighted_phi3(model, x, m, [(1.0, m)], opts)
    else:
        series = _weighted_1f1_series(model, x, m, [(1.0, m)], opts, diag, "square series")
    return _finish(model, x, series, diag, "min_cdf_square")


def min_cdf_2col(model: NoncentralWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
                 *, resum: bool = True, diag: Diagnostics | None = None) -> float:
    """Minimum-eigenvalue c.d.f. for ``m = 2`` and any ``n >= 2``.

    The literal form (``resum=False``) is an outer series in ``k`` whose
    ``k``-th term is a finite sum over ``t`` of
    ``C(k, t) eta^t (x mu)^(k-t) rho(t, x)``, with ``rho`` carrying the
    Gegenbauer factors at ``tr(Sigma^-1) sqrt|Sigma| / 2``. That series
    needs about as many terms as ``exp(eta)`` does.

    ``rho(t, x) / (2)_t`` is a polynomial of degree ``n - 2`` in ``t``, so
    ``rho(t, x) = sum_{b=2..n} w_b(x) (b)_t`` exactly; the ``t``-sum then
    resums to ``sum_b w_b 1F1(b; n + k; eta)`` and only ``x mu`` is left in
    the outer series. ``resum=True`` (the default) evaluates that form.
    """
    if model.m != 2:
        raise UnsupportedShape(f"min_cdf_2col needs m = 2, got m={model.m}")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    n = model.n
    norm = math.exp(mv_gamma_ln(2, n)) * model.sigma.det() ** (n - 2)
    if resum:
        return _weighted_min(model, x, n, lambda mod, xx: rho_weights(mod, xx, norm),
                             opts, False, diag, "min_cdf_2col")
    xm, eta = x * model.mu, model.eta
    rho = []

    def term(k):
        while len(rho) <= k:
            rho.append(_rho_row(model, x, len(rho)))
        inner = sum(math.comb(k, t) * eta**t * xm ** (k - t) * rho[t] for t in range(k + 1))
        return inner / (math.factorial(k) * pochhammer(n, k))

    series, used = adaptive_sum(term, opts, "2-column series", _floor(model, x) * norm)
    if diag is not None:
        diag.record(used)
    return _finish(model, x, series / norm, diag, "min_cdf_2col")


def rho_weights(model: NoncentralWishartModel, x: float, norm: float = 1.0):
    """``[(w_b, b)]`` with ``rho(t, x) / norm = sum_b w_b (b)_t`` for ``b = 2..n``.

    Matching ``t = 0..n-2`` determines the weights, since both sides are
    ``(2)_t`` times a polynomial of degree ``n - 2`` in ``t``.
    """
    n = model.n
    ts = range(n - 1)
    bs = range(2, n + 1)
    lhs = np.array([[pochhammer(b, t) for b in bs] for t in ts])
    rhs = np.array([_rho_row(model, x, t) / norm for t in ts])
    w = np.linalg.solve(lhs, rhs)
    return [(float(wb), b) for wb, b in zip(w, bs)]


def _rho_row(model, x, t):
    """``rho(t, x)`` with the inner index ``j`` starting at 0."""
    n = model.n
    det_s = model.sigma.det()
    beta = 0.5 * model.sigma_inv.trace() * math.sqrt(det_s)
    ratio = model.mu_over_eta
    acc = 0.0
    for i in range(n - 1):
        for j in range(i + 1):
            omega = i - j + 2
            base = (math.comb(n - 2, i) * math.comb(i, j) * math.factorial(j)
                    * pochhammer(omega, t) * math.exp(mv_gamma_ln(2, omega))
                    * x ** (2 * n + j - 2 * i - 4))
            for l in range(min(j, t) + 1):
                acc += ((-1) ** l * base * math.comb(t, l) * ratio**l
                        * det_s ** (i + l / 2.0 - j / 2.0)
                        * gegenbauer(j - l, omega + t, beta))
    return acc


def _weights_3x2(model, x):
    r = model.mu_over_eta
    tr_si = model.sigma_inv.trace()
    rho1 = 1.0 + (tr_si - r) * x
    rho2 = r * x + x * x / (2.0 * model.sigma.det())
    return [(rho1, 3), (rho2, 2)]


#: weight sets for the (2, 4) closed form; "derived" follows from the
#: 2-column formula at n = 4, "statement" is the printed variant
FOUR_BY_TWO_VARIANTS = ("derived", "statement")


def _weights_4x2(model, x, variant="derived"):
    r = model.mu_over_eta
    tr_si = model.sigma_inv.trace()
    det_s = model.sigma.det()
    a1 = tr_si - r
    if variant == "derived":
        nu1 = 1.0 + a1 * x + a1**2 / 2.0 * x**2
        nu2 = r * x + r * a1 * x**2 + a1 / (3.0 * det_s) * x**3
        nu3 = r**2 / 2.0 * x**2 + r * x**3 / (3.0 * det_s) + x**4 / (12.0 * det_s**2)
        return [(nu1, 4), (nu2, 3), (nu3, 2)]
    if variant != "statement":
        raise ValueError(f"unknown variant {variant!r}; expected one of {FOUR_BY_TWO_VARIANTS}")
    tr_si2 = float(np.trace(model.sigma_inv.entries @ model.sigma_inv.entries).real)
    a2 = tr_si**2 - 2.0 / det_s - r
    nu1 = 1.0 + a1 * x + a1 / 2.0 * x**2
    nu2 = (r * x + (1.0 / 3.0 + a2 / 3.0 + 2.0 / 3.0 * tr_si * a1 - a1**2) * x**2
           + a1 / (3.0 * det_s) * x**3)
    nu3 = ((a1**2 / 2.0 - 2.0 / 3.0 * a1 * tr_si - a2 / 3.0 + tr_si**2 / 3.0 + tr_si2 / 6.0) * x**2
           + r * x**3 / (3.0 * det_s) + x**4 / (12.0 * det_s**2))
    return [(nu1, 4), (nu2, 3), (nu3, 2)]


def _weights_4x3(model, x):
    r = model.mu_over_eta
    det_s = model.sigma.det()
    tts = model.tr_theta_sigma / model.eta
    rho1 = 1.0 + (model.sigma_inv.trace() - r) * x + tts / (2.0 * det_s) * x**2
    rho2 = r * x + (model.sigma.trace() - tts) / (2.0 * det_s) * x**2 + x**3 / (6.0 * det_s)
    return [(rho1, 4), (rho2, 3)]


def _weighted_min(model, x, n, weights_fn, opts, use_phi3, diag, label):
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    weights = weights_fn(model, x)
    if use_phi3:
        series = _weighted_phi3(model, x, n, weights, opts)
    else:
        series = _weighted_1f1_series(model, x, n, weights, opts, diag, label)
    return _finish(model, x, series, diag, label)


def min_cdf_3x2(model, x, opts: SeriesOptions = DEFAULT_OPTIONS, *, use_phi3=False, diag=None) -> float:
    """Minimum-eigenvalue c.d.f. for ``(m, n) = (2, 3)``."""
    if (model.m, model.n) != (2, 3):
        raise UnsupportedShape(f"min_cdf_3x2 needs (m, n) = (2, 3), got ({model.m}, {model.n})")
    return _weighted_min(model, x, 3, _weights_3x2, opts, use_phi3, diag, "min_cdf_3x2")


def min_cdf_4x2(model, x, opts: SeriesOptions = DEFAULT_OPTIONS, *, use_phi3=False, diag=None,
                variant: str = "derived") -> float:
    """Minimum-eigenvalue c.d.f. for ``(m, n) = (2, 4)``.

    With ``a1 = tr(Sigma^-1) - mu/eta`` and ``r = mu/eta`` the weights of
    ``1F1(4|3|2; 4 + k; eta)`` are ``1 + a1 x + a1^2 x^2 / 2``,
    ``r x + r a1 x^2 + a1 x^3 / (3|Sigma|)`` and
    ``r^2 x^2 / 2 + r x^3 / (3|Sigma|) + x^4 / (12|Sigma|^2)``.
    ``variant="statement"`` selects the printed weights, which go negative.
    """
    if (model.m, model.n) != (2, 4):
        raise UnsupportedShape(f"min_cdf_4x2 needs (m, n) = (2, 4), got ({model.m}, {model.n})")

    def weights(mod, xx):
        return _weights_4x2(mod, xx, variant)

    return _weighted_min(model, x, 4, weights, opts, use_phi3, diag, "min_cdf_4x2")


def min_cdf_4x3(model, x, opts: SeriesOptions = DEFAULT_OPTIONS, *, use_phi3=False, diag=None) -> float:
    """Minimum-eigenvalue c.d.f. for ``(m, n) = (3, 4)``."""
    if (model.m, model.n) != (3, 4):
        raise UnsupportedShape(f"min_cdf_4x3 needs (m, n) = (3, 4), got ({model.m}, {model.n})")
    return _weighted_min(model, x, 4, _weights_4x3, opts, use_phi3, diag, "min_cdf_4x3")


def min_cdf(model: NoncentralWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
            *, diag: Diagnostics | None = None) -> float:
    """Minimum-eigenvalue c.d.f., routed by shape."""
    m, n = model.m, model.n
    if m == n:
        return min_cdf_square(model, x, opts, diag=diag)
    if m == 2:
        return min_cdf_2col(model, x, opts, diag=diag)
    if (m, n) == (3, 4):
        return min_cdf_4x3(model, x, opts, diag=diag)
    raise UnsupportedShape(f"no closed form for (m, n) = ({m}, {n}); supported: {SUPPORTED_MIN_SHAPES}")


# ---------------------------------------------------------------------------
# maximum eigenvalue
# ---------------------------------------------------------------------------

def max_cdf_2col(model: NoncentralWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
                 *, perturb: bool = False, diag: Diagnostics | None = None) -> float:
    """Maximum-eigenvalue c.d.f. for ``m = 2`` and any ``n >= 2``.

    ``x^(2n) e^-eta / (n! (n+1)! |Sigma|^n) sum_k (x mu)^k / (n)_k * phi_k`` with
    ``phi_k`` the ``k``-th Taylor coefficient of
    ``1F1~(n; n+2; -x Sigma^-1 + y alpha alpha^H)``, computed in ``u = y / x``. The jet order grows in
    chunks until the series meets the stop rule.
    """
    if model.m != 2:
        raise UnsupportedShape(f"max_cdf_2col needs m = 2, got m={model.m}")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    n = model.n
    log_pre = (2 * n * math.log(x) - model.eta - math.lgamma(n + 1) - math.lgamma(n + 2)
               - n * math.log(model.sigma.det()))
    if math.exp(log_pre) == 0.0:
        return 0.0  # the series is O(1) here, so F underflows
    a_mat = model.sigma_inv * (-x)
    # expand in u = y / x: the eigenvalue gap of A is O(x), so jets in y overflow as x -> 0
    b_mat = model.projector * x
    xm = model.mu
    order = min(32, opts.max_terms)
    while True:
        coeffs = phi_derivatives(a_mat, b_mat, n, order, opts, perturb=perturb).phi_jet.coeffs

        def term(k, coeffs=coeffs):
            return xm**k / pochhammer(n, k) * coeffs[k]

        chunk = SeriesOptions(opts.rel_tol, order + 1, min(opts.min_terms, order + 1))
        try:
            series, used = adaptive_sum(term, chunk, "max series")
            break
        except NoConvergence:
            if order >= opts.max_terms - 1:
                raise
            order = min(2 * order, opts.max_terms - 1)
    if diag is not None:
        diag.record(used)
    return clamp_probability(math.exp(log_pre) * series, diag, "max_cdf_2col")



def max_cdf(model: NoncentralWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
            *, diag: Diagnostics | None = None) -> float:
    """Maximum-eigenvalue c.d.f. (only ``m = 2`` has a closed form)."""
    if model.m != 2:
        raise UnsupportedShape(f"no maximum-eigenvalue closed form for m={model.m}; supported: m = 2, any n >= 2")
    return max_cdf_2col(model, x, opts, diag=diag)
