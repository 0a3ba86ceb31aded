"""Extreme-eigenvalue c.d.f.s of correlated gamma-Wishart matrices.

``V = (Xh + Xb)^H (Xh + Xb)`` with ``Xh ~ CN(0, I_n (x) Sigma)`` and
``Xb^H Xb ~ Gamma_m(alpha, Omega)``. With ``S = Sigma^-1 (Sigma^-1 + Omega)^-1 Sigma^-1``
and ``Q = Sigma^-1 - S`` every formula here is a finite sum when ``alpha - n``
is a positive integer.

The ``m = 2`` minimum is assembled once per model as a polynomial in ``x``,
``P(lambda_min > x) = K etr(-xQ) sum_e c_e x^e``, so a grid costs one
polynomial evaluation per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .diagnostics import Diagnostics, clamp_probability
from .errors import DomainError, InvalidDOF, RegimeUnsupported, Singular
from .hermitian import HermitianMatrix, as_hermitian
from .kernels import (
    DEFAULT_TWO_TRACE_VARIANT,
    incomplete_gamma_prefactor,
    phi_derivatives,
    two_trace_inner,
)
from .special import DEFAULT_OPTIONS, SeriesOptions, elem_sym_cos2, mv_gamma_ln

SINGULAR_S = 1e-14


def _tr(a) -> float:
    return float(np.trace(a).real)


def _det(a) -> float:
    return float(np.linalg.det(a).real)


@dataclass(frozen=True, eq=False)
class GammaWishartModel:
    """Model ``Gamma W_m(n, alpha, Sigma, Omega)``."""

    sigma: HermitianMatrix
    omega: HermitianMatrix
    n: int
    alpha: int

    def __init__(self, sigma, omega, n: int, alpha):
        sigma = as_hermitian(sigma)
        omega = as_hermitian(omega)
        if sigma.dim != omega.dim:
            raise DomainError("Sigma and Omega must have the same size")
        m = sigma.dim
        if int(n) != n or n < m:
            raise DomainError(f"need an integer n >= m = {m}, got n={n}")
        if int(alpha) != alpha or alpha < m:
            raise InvalidDOF(f"need an integer alpha >= m = {m}, got alpha={alpha}")
        for name, mat in (("Sigma", sigma), ("Omega", omega)):
            if not mat.is_positive_definite():
                raise DomainError(f"{name} must be positive definite")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "alpha", int(alpha))
        if not self.q.is_positive_definite():
            raise DomainError("Q = Sigma^-1 - S is not positive definite")

    @property
    def m(self) -> int:
        return self.sigma.dim

    @cached_property
    def sigma_inv(self) -> HermitianMatrix:
        return self.sigma.inv()

    @cached_property
    def s(self) -> HermitianMatrix:
        si = self.sigma_inv.entries
        return HermitianMatrix(si @ np.linalg.inv(si + self.omega.entries) @ si)

    @cached_property
    def q(self) -> HermitianMatrix:
        return self.sigma_inv - self.s

    @cached_property
    def log_k(self) -> float:
        """``log K_mn`` with ``K_mn = |Omega|^alpha / (Gamma~_m(n) |Sigma|^n |Sigma^-1 + Omega|^alpha)``."""
        a, n, m = self.alpha, self.n, self.m
        return (a * math.log(self.omega.det()) - mv_gamma_ln(m, n) - n * math.log(self.sigma.det())
                - a * math.log(_det(self.sigma_inv.entries + self.omega.entries)))

    @cached_property
    def _poly_cache(self) -> dict:
        return {}

    @property
    def excess(self) -> int:
        """``alpha - n``."""
        return self.alpha - self.n

    @property
    def min_supported(self) -> bool:
        return (self.m == 2 and self.excess > 0) or (self.m, self.n, self.alpha) == (3, 3, 4)

    @property
    def max_supported(self) -> bool:
        return self.m == 2 and self.excess > 0


def _check_x(x):
    x = float(x)
    if not x >= 0.0 or not math.isfinite(x):
        raise DomainError(f"x must be a finite non-negative number, got {x!r}")
    return x


def _require_2x2(model, what):
    if model.m != 2 or model.excess <= 0:
        raise RegimeUnsupported(
            f"{what} needs m = 2 and integer alpha > n; got m={model.m}, n={model.n}, alpha={model.alpha}")


def _partitions(model):
    """Yield ``(k, k1, l, d1 * d2, nu, eps)`` over the finite zonal expansion.

    ``kappa = (k1, k - k1)`` with ``ceil(k/2) <= k1 <= min(k, alpha - n)``;
    ``nu = n + l + k - k1 - 2`` and ``eps = 2 k1 - k - 2 l``.
    """
    n, big = model.n, model.excess
    det_s = model.s.det()
    for k in range(2 * big + 1):
        for k1 in range(math.ceil(k / 2), min(k, big) + 1):
            k2 = k - k1
            d1 = (math.factorial(big) * math.factorial(big + 1) * (2 * k1 - k + 1)
                  / (math.factorial(big - k1) * math.factorial(big + 1 - k2)
                     * math.factorial(k1 + 1) * math.factorial(k2)
                     * math.prod(range(n, n + k1)) * math.prod(range(n - 1, n - 1 + k2))))
            e = elem_sym_cos2(2 * k1 - k + 1)
            for l in range(len(e)):
                d2 = (-1) ** l * 4.0**l * e[l] * det_s ** (k2 + l)
                yield k, k1, l, d1 * d2, n + l + k2 - 2, 2 * k1 - k - 2 * l


# ---------------------------------------------------------------------------
# minimum eigenvalue
# ---------------------------------------------------------------------------

def _j_table(model, variant):
    """``J_{t,p,j}`` keyed by ``(t, p, omega)``; independent of ``x``."""
    q, s = model.q.entries, model.s.entries
    qinv_s = np.linalg.inv(q) @ s
    args = (_tr(q), model.q.det(), _tr(s), _tr(qinv_s), _det(qinv_s))
    cache = {}

    def j_value(t, p, omega):
        key = (t, p, omega)
        if key not in cache:
            cache[key] = math.exp(mv_gamma_ln(2, omega)) * two_trace_inner(*args, omega, p, t, variant)
        return cache[key]

    return j_value


def min_polynomial(model: GammaWishartModel, variant: str = DEFAULT_TWO_TRACE_VARIANT) -> np.ndarray:
    """Coefficients ``c_e`` with ``P(lambda_min > x) = K etr(-xQ) sum_e c_e x^e`` (``m = 2``).

    Every power of ``x`` that arises is non-negative; ``K c_0 = 1``.
    """
    _require_2x2(model, "min_polynomial")
    cached = model._poly_cache.get(variant)
    if cached is not None:
        return cached
    n = model.n
    det_q = model.q.det()
    tr_s = model.s.trace()
    j_value = _j_table(model, variant)
    terms = {}
    for k, _k1, _l, weight, nu, eps in _partitions(model):
        for p in range(eps + 1):
            outer = weight * math.factorial(p) * math.comb(eps, p) * tr_s ** (eps - p)
            for j in range(nu + 1):
                lead = outer * math.comb(nu, j) / det_q ** (j + 2)
                for t in range(j + 1):
                    power = 2 * n + k - 2 * (j + 2) - p + t
                    val = (lead * math.factorial(j) / math.factorial(j - t) * det_q**t
                           * j_value(t, p, j - t + 2))
                    terms.setdefault(power, []).append(val)
    if min(terms) < 0:
        raise AssertionError("negative power of x in the gamma-Wishart minimum")
    out = np.zeros(max(terms) + 1)
    for power, vals in terms.items():
        out[power] = math.fsum(vals)
    out.setflags(write=False)
    model._poly_cache[variant] = out
    return out


def min_cdf_gw2(model: GammaWishartModel, x: float, *, variant: str = DEFAULT_TWO_TRACE_VARIANT,
                poly: np.ndarray | None = None, diag: Diagnostics | None = None) -> float:
    """Minimum-eigenvalue c.d.f. for ``m = 2`` and integer ``alpha > n >= 2``.

    ``variant`` picks the partition Pochhammer factor inside ``J`` (see
    :func:`.kernels.lemma_two_trace`). ``poly`` may carry a precomputed
    :func:`min_polynomial` for grid evaluation.
    """
    _require_2x2(model, "min_cdf_gw2")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    if poly is None:
        poly = min_polynomial(model, variant)
    survival = math.exp(model.log_k - x * model.q.trace()) * np.polynomial.polynomial.polyval(x, poly)
    return clamp_probability(1.0 - survival, diag, "min_cdf_gw2")


def _determinant_ratio(model):
    """``|Omega| / |Sigma^-1 + Omega|``."""
    return model.omega.det() / _det(model.sigma_inv.entries + model.omega.entries)


def min_cdf_gw2_23(model: GammaWishartModel, x: float, diag: Diagnostics | None = None) -> float:
    """Closed form for ``(m, n, alpha) = (2, 2, 3)``; quadratic in ``x`` times ``etr(-xQ)``."""
    if (model.m, model.n, model.alpha) != (2, 2, 3):
        raise RegimeUnsupported(f"min_cdf_gw2_23 needs (m, n, alpha) = (2, 2, 3), "
                                f"got ({model.m}, {model.n}, {model.alpha})")
    x = _check_x(x)
    s, q = model.s, model.q
    det_s = s.det()
    c0 = _det(np.eye(2) + model.omega.inv().entries @ model.sigma_inv.entries)
    c1 = s.trace() / 2.0 + q.inv().trace() * det_s
    poly = c0 + c1 * x + det_s / 2.0 * x * x
    survival = _determinant_ratio(model) * math.exp(-x * q.trace()) * poly
    return clamp_probability(1.0 - survival, diag, "min_cdf_gw2_23")


def min_cdf_gw334(model: GammaWishartModel, x: float, diag: Diagnostics | None = None) -> float:
    """Closed form for ``(m, n, alpha) = (3, 3, 4)``; cubic in ``x`` times ``etr(-xQ)``.

    ``F = 2S - 3 Q^-1 S - 3|S| Q^-1 + 6|S||Q|^-1 Q + 3|I + S| Q^-1 (I + S)^-1 S``
    and ``G = S^-1 + 3 Q^-1`` enter through their traces.
    """
    if (model.m, model.n, model.alpha) != (3, 3, 4):
        raise RegimeUnsupported(f"min_cdf_gw334 needs (m, n, alpha) = (3, 3, 4), "
                                f"got ({model.m}, {model.n}, {model.alpha})")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    survival = _determinant_ratio(model) * math.exp(-x * model.q.trace()) * np.polynomial.polynomial.polyval(
        x, gw334_polynomial(model))
    return clamp_probability(1.0 - survival, diag, "min_cdf_gw334")


def gw334_polynomial(model: GammaWishartModel) -> np.ndarray:
    """The four coefficients of the cubic in :func:`min_cdf_gw334`."""
    s, q = model.s.entries, model.q.entries
    eye = np.eye(3)
    det_s = _det(s)
    if abs(det_s) < SINGULAR_S:
        raise Singular(f"|S| = {det_s:.3e}; G needs S^-1")
    qinv = np.linalg.inv(q)
    ips = eye + s
    f_mat = (2 * s - 3 * qinv @ s - 3 * det_s * qinv + 6 * det_s / _det(q) * q
             + 3 * _det(ips) * qinv @ np.linalg.inv(ips) @ s)
    g_mat = np.linalg.inv(s) + 3 * qinv
    c0 = _det(eye + model.omega.inv().entries @ model.sigma_inv.entries)
    return np.array([c0, _tr(f_mat) / 6.0, _tr(g_mat) * det_s / 6.0, det_s / 6.0])


def min_cdf(model: GammaWishartModel, x: float, diag: Diagnostics | None = None) -> float:
    """Minimum-eigenvalue c.d.f., routed by regime."""
    if (model.m, model.n, model.alpha) == (3, 3, 4):
        return min_cdf_gw334(model, x, diag)
    if model.m == 2 and model.excess > 0:
        return min_cdf_gw2(model, x, diag=diag)
    raise RegimeUnsupported(
        f"no closed form for (m, n, alpha) = ({model.m}, {model.n}, {model.alpha}); "
        "supported: m = 2 with integer alpha > n, and (3, 3, 4)")


# ---------------------------------------------------------------------------
# maximum eigenvalue
# ---------------------------------------------------------------------------

def _phi(model, x, a, order, opts, perturb):
    # derivatives in u = y / x, i.e. x^j times the y-derivatives; the eigenvalue
    # gap of -xQ is O(x), so y-jets would overflow as x -> 0
    return phi_derivatives(model.q * (-x), model.s * x, a, order, opts, perturb=perturb)


def max_cdf_gw2(model: GammaWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
                *, perturb: bool = False, diag: Diagnostics | None = None) -> float:
    """Maximum-eigenvalue c.d.f. for ``m = 2`` and integer ``alpha > n >= 2``.

    ``K x^(2n) sum d1 d2 R x^k`` with ``R`` the incomplete integral
    ``Gamma~_2(2) Gamma~_2(nu+2) / Gamma~_2(nu+4) phi^(eps)(0)`` of
    ``phi(y) = 1F1~(nu+2; nu+4; -xQ + yS)``.
    """
    _require_2x2(model, "max_cdf_gw2")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    pre = math.exp(model.log_k + 2 * model.n * math.log(x))
    if pre == 0.0:
        return 0.0  # the bracket is O(1) here, so F underflows
    needed = {}
    for _k, _k1, _l, _w, nu, eps in _partitions(model):
        needed[nu] = max(needed.get(nu, 0), eps)
    derivs = {nu: _phi(model, x, nu + 2, order, opts, perturb).values for nu, order in needed.items()}
    parts = [weight * incomplete_gamma_prefactor(nu + 2) * derivs[nu][eps] * x ** (k - eps)
             for k, _k1, _l, weight, nu, eps in _partitions(model)]
    value = pre * math.fsum(parts)
    return clamp_probability(value, diag, "max_cdf_gw2")


def _max_prefactor(model, x):
    """``|Omega|^alpha x^(2n) / (n! (n+1)! |Sigma|^n |Sigma^-1 + Omega|^alpha)``."""
    n = model.n
    return math.exp(model.log_k + mv_gamma_ln(2, n) + 2 * n * math.log(x)
                    - math.lgamma(n + 1) - math.lgamma(n + 2))


def max_cdf_gw2_np1(model: GammaWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
                    *, perturb: bool = False, diag: Diagnostics | None = None) -> float:
    """Closed form for ``alpha = n + 1``."""
    if model.m != 2 or model.excess != 1:
        raise RegimeUnsupported("max_cdf_gw2_np1 needs m = 2 and alpha = n + 1")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    n = model.n
    pre = _max_prefactor(model, x)
    if pre == 0.0:
        return 0.0
    det_s = model.s.det()
    p0 = _phi(model, x, n, 1, opts, perturb).values
    p1 = _phi(model, x, n + 1, 0, opts, perturb).values
    body = p0[0] + p0[1] / n + det_s * x**2 / ((n + 1) * (n + 2)) * p1[0]
    return clamp_probability(pre * body, diag, "max_cdf_gw2_np1")


def max_cdf_gw2_np2(model: GammaWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
                    *, perturb: bool = False, diag: Diagnostics | None = None) -> float:
    """Closed form for ``alpha = n + 2``."""
    if model.m != 2 or model.excess != 2:
        raise RegimeUnsupported("max_cdf_gw2_np2 needs m = 2 and alpha = n + 2")
    x = _check_x(x)
    if x == 0.0:
        return 0.0
    n = model.n
    pre = _max_prefactor(model, x)
    if pre == 0.0:
        return 0.0
    det_s = model.s.det()
    p0 = _phi(model, x, n, 2, opts, perturb).values
    p1 = _phi(model, x, n + 1, 1, opts, perturb).values
    p2 = _phi(model, x, n + 2, 0, opts, perturb).values
    body = (p0[0] + 2 / n * p0[1] + p0[2] / (n * (n + 1))
            + 2 * det_s * x**2 / (n + 1) ** 2 * p1[0]
            + 2 * det_s * x**2 / ((n + 1) ** 2 * (n + 2)) * p1[1]
            + det_s**2 * x**4 / ((n + 1) * (n + 2) ** 2 * (n + 3)) * p2[0])
    return clamp_probability(pre * body, diag, "max_cdf_gw2_np2")


def max_cdf(model: GammaWishartModel, x: float, opts: SeriesOptions = DEFAULT_OPTIONS,
            *, diag: Diagnostics | None = None) -> float:
    """Maximum-eigenvalue c.d.f., routed by regime."""
    _require_2x2(model, "max_cdf")
    return max_cdf_gw2(model, x, opts, diag=diag)


__all__ = [
    "GammaWishartModel", "min_polynomial", "min_cdf_gw2", "min_cdf_gw2_23", "min_cdf_gw334",
    "gw334_polynomial", "min_cdf", "max_cdf_gw2", "max_cdf_gw2_np1", "max_cdf_gw2_np2", "max_cdf",
]
