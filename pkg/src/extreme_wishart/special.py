"""Scalar special functions used by the c.d.f. evaluators.

Series are summed adaptively under a :class:`SeriesOptions` policy: a series
stops once a term drops below ``rel_tol`` times the running sum (after at least
``min_terms`` terms) and raises :class:`NoConvergence` when ``max_terms`` is hit
first. Pochhammer symbols and multivariate gamma functions are available in
log form with sign tracking, since direct products overflow near k = 170.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, NoConvergence


@dataclass(frozen=True)
class SeriesOptions:
    rel_tol: float = 1e-13
    max_terms: int = 200
    min_terms: int = 5

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not (self.max_terms >= self.min_terms >= 1):
            raise ValueError("need max_terms >= min_terms >= 1")


DEFAULT_OPTIONS = SeriesOptions()


def _is_nonpositive_int(a: float) -> bool:
    return a <= 0 and float(a).is_integer()


# ---------------------------------------------------------------------------
# Pochhammer symbols and gamma functions
# ---------------------------------------------------------------------------

def pochhammer(a: float, k: int) -> float:
    """Rising factorial ``(a)_k`` by direct product (any real ``a``)."""
    if k < 0:
        raise DomainError("k must be non-negative")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def signed_ln_pochhammer(a: float, k: int):
    """``(sign, log|(a)_k|)``; sign 0 means the symbol vanishes."""
    if k < 0:
        raise DomainError("k must be non-negative")
    if k == 0:
        return 1, 0.0
    if _is_nonpositive_int(a) and k > -a:
        return 0, -math.inf
    if a > 0:
        return 1, float(gammaln(a + k) - gammaln(a))
    sign, total = 1, 0.0
    for j in range(k):
        f = a + j
        if f < 0:
            sign = -sign
        total += math.log(abs(f))
    return sign, total


def ln_pochhammer(a: float, k: int) -> float:
    """``log (a)_k`` for ``a > 0`` (or a symbol that stays positive)."""
    sign, val = signed_ln_pochhammer(a, k)
    if sign <= 0:
        raise DomainError(f"(a)_k is not positive for a={a}, k={k}")
    return val


def pochhammer_ratio(a: float, b: float, k: int) -> float:
    """``(a)_k / (b)_k`` computed term by term."""
    out = 1.0
    for j in range(k):
        out *= (a + j) / (b + j)
    return out


def gen_pochhammer(a: float, kappa: Sequence[int]) -> float:
    """Complex generalized Pochhammer ``[a]_kappa = prod_j (a - j + 1)_{k_j}``."""
    out = 1.0
    for j, kj in enumerate(kappa):
        out *= pochhammer(a - j, kj)
    return out


def mv_gamma_ln(m: int, a: float) -> float:
    """Log of the complex multivariate gamma function ``Gamma~_m(a)``."""
    if a - m + 1 <= 0:
        raise DomainError(f"multivariate gamma pole: need a > m - 1, got a={a}, m={m}")
    return m * (m - 1) / 2.0 * math.log(math.pi) + sum(
        float(gammaln(a - j)) for j in range(m)
    )


def mv_gamma(m: int, a: float) -> float:
    return math.exp(mv_gamma_ln(m, a))


# ---------------------------------------------------------------------------
# Confluent hypergeometric functions
# ---------------------------------------------------------------------------

def _check_b(b):
    if _is_nonpositive_int(b):
        raise DomainError(f"b = {b} is a non-positive integer")


def _kummer_series(a, b, z, opts):
    total, term = 1.0, 1.0
    if z == 0.0:
        return 1.0, 1
    for k in range(opts.max_terms):
        term *= (a + k) * z / ((b + k) * (k + 1))
        total += term
        if term == 0.0:
            return total, k + 2
        if k + 2 >= opts.min_terms and abs(term) < opts.rel_tol * abs(total):
            # terms must also be shrinking, else the partial sum can still move
            if abs((a + k + 1) * z / ((b + k + 1) * (k + 2))) < 1.0:
                return total, k + 2
    raise NoConvergence(
        f"1F1({a}; {b}; {z}) did not converge in {opts.max_terms} terms",
        terms=opts.max_terms,
        last_term=term,
    )


def kummer_1f1(a: float, b: float, z: float, opts: SeriesOptions = DEFAULT_OPTIONS) -> float:
    """Confluent hypergeometric function ``1F1(a; b; z)`` for real arguments.

    Negative ``z`` goes through Kummer's transformation
    ``1F1(a; b; z) = e^z 1F1(b - a; b; -z)`` so that the summed series has
    terms of one sign whenever ``b > a``.
    """
    return kummer_1f1_terms(a, b, z, opts)[0]


def kummer_1f1_terms(a, b, z, opts: SeriesOptions = DEFAULT_OPTIONS):
    """``(value, terms_used)`` for :func:`kummer_1f1`."""
    _check_b(b)
    if _is_nonpositive_int(a):
        # terminating polynomial, exact as written
        return _kummer_series(a, b, z, SeriesOptions(opts.rel_tol, max(opts.max_terms, int(-a) + 2), 1))
    if z < 0 and not _is_nonpositive_int(b - a):
        val, n = _kummer_series(b - a, b, -z, opts)
        return math.exp(z) * val, n
    return _kummer_series(a, b, z, opts)


def kummer_1f1_fixed(a, b, z, terms: int) -> float:
    """Plain partial sum of the first ``terms`` terms (no transformation)."""
    total, term = 0.0, 1.0
    for k in range(terms):
        total += term
        term *= (a + k) * z / ((b + k) * (k + 1))
    return total


def phi3(b: float, c: float, x: float, y: float, opts: SeriesOptions = DEFAULT_OPTIONS) -> float:
    """Humbert confluent function
    ``Phi3(b, c; x, y) = sum_{t,k} (b)_t x^t y^k / ((c)_{t+k} t! k!)``.

    Summed over anti-diagonals ``t + k = s``; the loop stops once a whole
    diagonal falls below ``rel_tol`` times the running total.
    """
    return phi3_terms(b, c, x, y, opts)[0]


def phi3_terms(b, c, x, y, opts: SeriesOptions = DEFAULT_OPTIONS):
    if c <= 0:
        raise DomainError("phi3 needs c > 0")
    total = 0.0
    # row[t] holds (b)_t x^t / t!
    row = [1.0]
    yk = [1.0]
    inv_cs = 1.0  # 1 / (c)_s
    for s in range(opts.max_terms):
        if s > 0:
            row.append(row[-1] * (b + s - 1) * x / s)
            yk.append(yk[-1] * y / s)
            inv_cs /= c + s - 1
        diag = inv_cs * sum(row[t] * yk[s - t] for t in range(s + 1))
        total += diag
        if s + 1 >= opts.min_terms and abs(diag) < opts.rel_tol * abs(total):
            return total, s + 1
    raise NoConvergence(f"Phi3({b}, {c}, {x}, {y}) did not converge", terms=opts.max_terms)


def phi3_resummed(b, c, x, y, opts: SeriesOptions = DEFAULT_OPTIONS) -> float:
    """``sum_k y^k / (k! (c)_k) 1F1(b; c + k; x)``, the single-series form of Phi3."""
    total, coef = 0.0, 1.0
    for k in range(opts.max_terms):
        if k > 0:
            coef *= y / (k * (c + k - 1))
        term = coef * kummer_1f1(b, c + k, x, opts)
        total += term
        if k + 1 >= opts.min_terms and abs(term) < opts.rel_tol * abs(total):
            return total
    raise NoConvergence("re-summed Phi3 did not converge", terms=opts.max_terms)


# ---------------------------------------------------------------------------
# Gegenbauer polynomials
# ---------------------------------------------------------------------------

def gegenbauer(n: int, nu: float, x: float) -> float:
    """Ultraspherical polynomial ``C_n^nu(x)`` by its three-term recurrence."""
    if n < 0:
        raise DomainError("degree must be non-negative")
    if n == 0:
        return 1.0
    prev, cur = 1.0, 2.0 * nu * x
    for k in range(2, n + 1):
        prev, cur = cur, (2.0 * x * (k + nu - 1) * cur - (k + 2 * nu - 2) * prev) / k
    return cur


def gegenbauer_scaled(n: int, nu: float, s: float, d: float) -> float:
    """``d^(n/2) C_n^nu(s / (2 sqrt(d)))`` as a polynomial in ``(s, d)``.

    Finite at ``d = 0`` where the plain argument blows up; the recurrence is
    ``k G_k = s (k + nu - 1) G_{k-1} - d (k + 2 nu - 2) G_{k-2}``.
    """
    if n < 0:
        raise DomainError("degree must be non-negative")
    if n == 0:
        return 1.0
    prev, cur = 1.0, nu * s
    for k in range(2, n + 1):
        prev, cur = cur, (s * (k + nu - 1) * cur - d * (k + 2 * nu - 2) * prev) / k
    return cur


# ---------------------------------------------------------------------------
# Elementary symmetric functions of cos^2 root sets
# ---------------------------------------------------------------------------

def elementary_symmetric(values: Sequence[float]) -> np.ndarray:
    """``e_0..e_q`` of ``values`` via iterative expansion of ``prod (1 + v z)``."""
    coeffs = np.zeros(len(values) + 1)
    coeffs[0] = 1.0
    for i, v in enumerate(values, start=1):
        coeffs[1 : i + 1] = coeffs[1 : i + 1] + v * coeffs[0:i]
    return coeffs


@lru_cache(maxsize=None)
def _elem_sym_cos2_cached(n: int):
    q = max(0, math.ceil((n - 2) / 2))
    roots = [math.cos(j * math.pi / n) ** 2 for j in range(1, q + 1)]
    out = elementary_symmetric(roots)
    out.setflags(write=False)
    return out


def elem_sym_cos2(n: int) -> np.ndarray:
    """Elementary symmetric functions of ``{cos^2(j pi / n)}``, ``j = 1..ceil((n-2)/2)``."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return _elem_sym_cos2_cached(int(n))


def elem_sym_cos2_tau(t1: int, t: int) -> np.ndarray:
    """Root-set coefficients for the partition ``(t1, t - t1)``: denominator ``2 t1 - t + 1``."""
    if not (math.ceil(t / 2) <= t1 <= t):
        raise DomainError(f"t1={t1} outside [ceil(t/2), t] for t={t}")
    return elem_sym_cos2(2 * t1 - t + 1)


def power_difference_quotient(n: int, trace: float, det: float) -> float:
    """``(x1^n - x2^n) / (x1 - x2)`` in terms of the trace and determinant of a 2x2 matrix."""
    e = elem_sym_cos2(n)
    return sum(
        (-1) ** i * 4.0**i * e[i] * det**i * trace ** (n - 1 - 2 * i) for i in range(len(e))
    )
