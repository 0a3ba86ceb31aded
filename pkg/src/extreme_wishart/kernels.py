"""Closed-form matrix integrals over Hermitian matrices.

The evaluators here are the building blocks of every c.d.f. in the package:

* :func:`incomplete_trace_integral` -- ``int_0^I |X|^(a-2) etr(AX) tr^p(BX) dX``
  over 2x2 matrices, through the y-derivatives of
  ``phi(y) = 1F1~(a; a+2; A + B y)`` (matrix argument) in determinant form.
* :func:`lemma_trace_integral`, :func:`lemma_2x2_trace_powers`,
  :func:`lemma_c110_integral`, :func:`lemma_two_trace` -- integrals over the
  whole positive-definite cone against ``etr(-AX)``.

Independent Monte Carlo oracles that check them live in :mod:`.oracles`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEigenvalues, DomainError
from .hermitian import HermitianMatrix, adjugate, as_hermitian, eigvals_hermitian
from .jets import TaylorJet, jet_compose_1f1, jet_div, jet_mul
from .special import (
    DEFAULT_OPTIONS,
    SeriesOptions,
    elem_sym_cos2_tau,
    gegenbauer,
    gegenbauer_scaled,
    mv_gamma_ln,
    pochhammer,
)

DEGENERACY_TOL = 1e-9
PERTURBATION = 1e-7

#: Pochhammer prefactor used by :func:`lemma_two_trace`; "shifted" is
#: ``(a)_{t1} (a-1)_{t-t1}`` and "statement" is ``(a)_{t1} (a)_{t-t1}``.
TWO_TRACE_VARIANTS = ("shifted", "statement")
DEFAULT_TWO_TRACE_VARIANT = "shifted"


def _tr(a):
    return float(np.trace(a).real)


def _det2(a):
    return float((a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]).real)


# ---------------------------------------------------------------------------
# eigenvalue jets of A + B y
# ---------------------------------------------------------------------------

def perturb_degenerate(a: HermitianMatrix) -> HermitianMatrix:
    """Split a (near) double eigenvalue: ``A + eps diag(1, -1)/2`` in A's eigenbasis."""
    pair = eigvals_hermitian(a)
    eps = PERTURBATION * max(abs(a.trace()), a.norm, 1e-300)
    lam = pair.values + np.array([-eps / 2.0, eps / 2.0])
    v = pair.vectors
    return HermitianMatrix(v @ np.diag(lam) @ v.conj().T)


def x_jets(a: HermitianMatrix, b: HermitianMatrix, p: int):
    """Taylor jets of the two eigenvalues ``x1(y) >= x2(y)`` of ``A + B y``.

    First and second orders follow from differentiating
    ``x1 + x2 = tr(A) + y tr(B)`` and ``x1 x2 = |A + B y|``; higher orders
    from the Leibniz expansion of the product, which gives
    ``x1^(j)(0) = sum_{k=1}^{j-1} C(j,k) x1^(j-k)(0) x2^(k)(0) / (x1(0) - x2(0))``
    and ``x2^(j) = -x1^(j)`` for ``j >= 2``. The recursion is run on Taylor
    coefficients (derivatives divided by ``j!``) so high orders do not overflow.
    """
    a = as_hermitian(a)
    b = as_hermitian(b)
    if a.dim != 2 or b.dim != 2:
        raise DomainError("x_jets needs 2x2 matrices")
    ev = eigvals_hermitian(a).values
    x2, x1 = float(ev[0]), float(ev[1])
    gap = x1 - x2
    if gap < DEGENERACY_TOL * (abs(x1) + abs(x2)) or gap == 0.0:
        raise DegenerateEigenvalues(f"eigenvalues {x1!r}, {x2!r} of A coincide")
    c1 = np.zeros(p + 1)
    c2 = np.zeros(p + 1)
    c1[0], c2[0] = x1, x2
    if p >= 1:
        tr_b = _tr(b.entries)
        # |A| tr(B A^-1) = tr(B adj A) stays finite for singular A
        cross = float(np.trace(b.entries @ adjugate(a).entries).real)
        c1[1] = (x1 * tr_b - cross) / gap
        c2[1] = (cross - x2 * tr_b) / gap
    if p >= 2:
        det_b = _det2(b.entries)
        c1[2] = (c1[1] * c2[1] - det_b) / gap
        c2[2] = -c1[2]
    for j in range(3, p + 1):
        c1[j] = np.dot(c1[j - 1 : 0 : -1], c2[1:j]) / gap
        c2[j] = -c1[j]
    return TaylorJet(c1), TaylorJet(c2)


# ---------------------------------------------------------------------------
# phi derivatives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhiDerivatives:
    """Taylor data of ``phi(y) = Delta(y) / h(y)`` at ``y = 0``.

    ``phi_jet`` and ``h_jet`` hold Taylor coefficients; ``values`` and
    ``h_derivs`` the corresponding derivatives ``phi^(j)(0)``, ``h^(j)(0)``.
    """

    a: float
    order: int
    phi_jet: TaylorJet
    h_jet: TaylorJet
    delta_jet: TaylorJet
    perturbed: bool = False

    @property
    def values(self) -> np.ndarray:
        return self.phi_jet.derivatives()

    @property
    def h_derivs(self) -> np.ndarray:
        return self.h_jet.derivatives()

    def coefficient(self, j: int) -> float:
        """``phi^(j)(0) / j!``."""
        return float(self.phi_jet.coeffs[j])


def _delta_jet(j1, j2, a, opts):
    f1 = jet_compose_1f1(a, a + 2, j1.coeffs[0], j1, opts)
    f2 = jet_compose_1f1(a, a + 2, j2.coeffs[0], j2, opts)
    g1 = jet_compose_1f1(a - 1, a + 1, j1.coeffs[0], j1, opts)
    g2 = jet_compose_1f1(a - 1, a + 1, j2.coeffs[0], j2, opts)
    return jet_mul(jet_mul(j1, f1), g2) - jet_mul(jet_mul(j2, f2), g1)


def phi_derivatives(a_mat: HermitianMatrix, b_mat: HermitianMatrix, a: float, p: int,
                    opts: SeriesOptions = DEFAULT_OPTIONS, perturb: bool = False) -> PhiDerivatives:
    """Derivatives ``phi^(0..p)(0)`` of ``phi(y) = 1F1~(a; a+2; A + B y)``.

    ``Delta(y) = x1 1F1(a;a+2;x1) 1F1(a-1;a+1;x2) - (1 <-> 2)`` is expanded as
    a jet, and ``phi`` follows from ``h phi = Delta`` with ``h = x1 - x2``
    solved order by order (the Leibniz recursion).

    With ``perturb=True`` a coincident eigenvalue pair of ``A`` is split by a
    relative ``1e-7`` shift (with a warning) instead of raising.
    """
    if not a > 1:
        raise DomainError("phi_derivatives needs a > 1")
    a_mat = as_hermitian(a_mat)
    b_mat = as_hermitian(b_mat)
    perturbed = False
    try:
        j1, j2 = x_jets(a_mat, b_mat, p)
    except DegenerateEigenvalues:
        if not perturb:
            raise
        warnings.warn("A has coincident eigenvalues; applying a 1e-7 relative split", RuntimeWarning)
        j1, j2 = x_jets(perturb_degenerate(a_mat), b_mat, p)
        perturbed = True
    delta = _delta_jet(j1, j2, a, opts)
    h = j1 - j2
    phi = jet_div(delta, h)
    return PhiDerivatives(a=a, order=p, phi_jet=phi, h_jet=h, delta_jet=delta, perturbed=perturbed)


def matrix_1f1_a_a2(x: HermitianMatrix, a: float, opts: SeriesOptions = DEFAULT_OPTIONS,
                    perturb: bool = True) -> float:
    """``1F1~(a; a+2; X)`` for 2x2 Hermitian ``X`` via the determinant form."""
    zero = HermitianMatrix(np.zeros((2, 2)))
    return phi_derivatives(x, zero, a, 0, opts, perturb=perturb).coefficient(0)


def incomplete_gamma_prefactor(a: float) -> float:
    """``Gamma~_2(a) Gamma~_2(2) / Gamma~_2(a + 2)``."""
    return math.exp(mv_gamma_ln(2, a) + mv_gamma_ln(2, 2) - mv_gamma_ln(2, a + 2))


def incomplete_trace_integral(a_mat, b_mat, a: float, p: int,
                              opts: SeriesOptions = DEFAULT_OPTIONS, perturb: bool = False) -> float:
    """``int_{0<X<I_2} |X|^(a-2) etr(AX) tr^p(BX) dX``."""
    d = phi_derivatives(a_mat, b_mat, a, p, opts, perturb=perturb)
    return incomplete_gamma_prefactor(a) * d.values[p]


# ---------------------------------------------------------------------------
# integrals over the positive-definite cone
# ---------------------------------------------------------------------------

def _check_rank_one(r: HermitianMatrix, tol=1e-8):
    ev = eigvals_hermitian(r).values
    top = ev[-1]
    if top <= 0 or abs(ev[-2]) > tol * top or ev[0] < -tol * top:
        raise DomainError("R must be rank one and non-negative")


def _check_pd(a: HermitianMatrix, name="A"):
    if eigvals_hermitian(a).values[0] <= 0:
        raise DomainError(f"{name} must be positive definite")


def lemma_trace_integral(a_mat, r_mat, a: float, t: int) -> float:
    """``int_{X>0} etr(-AX) tr(X) |X|^(a-m) tr^t(RX) dX`` for rank-one ``R``."""
    a_mat = as_hermitian(a_mat)
    r_mat = as_hermitian(r_mat)
    m = a_mat.dim
    if not a > m - 1:
        raise DomainError(f"need a > m - 1 = {m - 1}")
    if t < 0:
        raise DomainError("t must be non-negative")
    _check_pd(a_mat)
    _check_rank_one(r_mat)
    ainv = a_mat.inv().entries
    r = r_mat.entries
    det_a = a_mat.det()
    tr_ra = _tr(r @ ainv)
    tr_ra2 = _tr(r @ ainv @ ainv)
    lead = pochhammer(a, t) * math.exp(mv_gamma_ln(m, a)) * det_a ** (-a)
    body = a * _tr(ainv) * tr_ra**t
    if t > 0:
        body += t * tr_ra2 * tr_ra ** (t - 1)
    return lead * body


def lemma_2x2_trace_powers(a_mat, r_mat, a: float, p: int, t: int) -> float:
    """``int_{X>0} etr(-AX) tr^p(X) |X|^(a-2) tr^t(RX) dX`` over 2x2 matrices.

    The trace power enters through Gegenbauer polynomials
    ``C^{a+t}_{p-k}(tr(A) / (2 sqrt|A|))``.
    """
    a_mat = as_hermitian(a_mat)
    r_mat = as_hermitian(r_mat)
    if a_mat.dim != 2:
        raise DomainError("2x2 matrices only")
    if not a > 1:
        raise DomainError("need a > 1")
    if p < 0 or t < 0:
        raise DomainError("p and t must be non-negative")
    _check_pd(a_mat)
    _check_rank_one(r_mat)
    det_a = a_mat.det()
    beta = a_mat.trace() / (2.0 * math.sqrt(det_a))
    tr_ra = _tr(r_mat.entries @ a_mat.inv().entries)
    tr_r = r_mat.trace()
    total = 0.0
    for k in range(min(p, t) + 1):
        total += ((-1) ** k * math.comb(t, k) * det_a ** (-k / 2.0) * tr_ra ** (t - k)
                  * tr_r**k * gegenbauer(p - k, a + t, beta))
    lead = math.factorial(p) * pochhammer(a, t) * math.exp(mv_gamma_ln(2, a)) * det_a ** (-(a + p / 2.0))
    return lead * total


def c110(x) -> float:
    """Zonal polynomial ``C_{1,1,0}(X)``: the second elementary symmetric function of the eigenvalues."""
    x = np.asarray(x)
    return float(((np.trace(x) ** 2 - np.trace(x @ x)) / 2.0).real)


def lemma_c110_integral(a_mat, r_mat, t: int, variant: str = "corrected") -> float:
    """``int_{X>0} etr(-AX) tr^t(RX) C_{1,1,0}(X) dX`` over 3x3 matrices.

    Expanding ``Gamma~_3(4) |A + R y|^-4 tr(A + R y)`` in powers of ``-y``
    gives ``Gamma~_3(4) |A|^-4 ((4)_t c^t tr(A) - t (4)_{t-1} c^(t-1) tr(R))``
    with ``c = tr(R A^-1)``. ``variant="statement"`` flips the sign of the
    second term (kept for comparison only; Monte Carlo rejects it).
    """
    a_mat = as_hermitian(a_mat)
    r_mat = as_hermitian(r_mat)
    if a_mat.dim != 3:
        raise DomainError("3x3 matrices only")
    if t < 0:
        raise DomainError("t must be non-negative")
    if variant not in ("corrected", "statement"):
        raise ValueError(f"unknown variant {variant!r}")
    _check_pd(a_mat)
    _check_rank_one(r_mat)
    tr_ra = _tr(r_mat.entries @ a_mat.inv().entries)
    body = pochhammer(4, t) * tr_ra**t * a_mat.trace()
    if t > 0:
        sign = -1.0 if variant == "corrected" else 1.0
        body += sign * t * pochhammer(4, t - 1) * tr_ra ** (t - 1) * r_mat.trace()
    return math.exp(mv_gamma_ln(3, 4)) * a_mat.det() ** (-4) * body


def two_trace_prefactor(a: float, t1: int, t: int, variant: str = DEFAULT_TWO_TRACE_VARIANT) -> float:
    """Partition Pochhammer factor for ``tau = (t1, t - t1)``."""
    if variant == "shifted":
        return pochhammer(a, t1) * pochhammer(a - 1, t - t1)
    if variant == "statement":
        return pochhammer(a, t1) * pochhammer(a, t - t1)
    raise ValueError(f"unknown variant {variant!r}; expected one of {TWO_TRACE_VARIANTS}")


def two_trace_inner(tr_a, det_a, tr_b, tr_ainv_b, det_ainv_b, a, p, t, variant):
    """Sum over ``t1`` and ``i`` of the two-trace integral, without ``p! t! |A|^-a Gamma~_2(a)``.

    ``|A|^{-eps_t1 - (p-k)/2} |B|^{(p-k)/2} C_{p-k}(.)`` is evaluated as
    ``|A|^{-eps_t1}`` times the scaled Gegenbauer polynomial in
    ``(tr(A^-1 B), |A^-1 B|)``, which stays finite for singular ``B``.
    """
    total = 0.0
    for t1 in range(math.ceil(t / 2), t + 1):
        e = elem_sym_cos2_tau(t1, t)
        outer = two_trace_prefactor(a, t1, t, variant) * (2 * t1 + 1 - t) / (
            math.factorial(t1 + 1) * math.factorial(t - t1))
        inner = 0.0
        for i in range(len(e)):
            eps_i = 2 * t1 - t - 2 * i
            eps = t1 - i
            for k in range(min(p, eps_i) + 1):
                inner += ((-1) ** (k + i) * 4.0**i * e[i] * math.comb(eps_i, k)
                          * tr_a ** (eps_i - k) * tr_b**k * det_a ** (-eps)
                          * gegenbauer_scaled(p - k, eps + a, tr_ainv_b, det_ainv_b))
        total += outer * inner
    return total


def lemma_two_trace(a_mat, b_mat, a: float, p: int, t: int,
                    variant: str = DEFAULT_TWO_TRACE_VARIANT) -> float:
    """``int_{X>0} etr(-AX) tr^p(BX) tr^t(X) |X|^(a-2) dX`` over 2x2 matrices.

    ``variant`` picks the partition Pochhammer factor: ``"shifted"`` uses
    ``[a]_tau = (a)_{t1} (a-1)_{t-t1}`` (the generalized Pochhammer symbol of
    the underlying zonal integral, and the default since it matches Monte
    Carlo), ``"statement"`` uses ``(a)_{t1} (a)_{t-t1}``.
    """
    a_mat = as_hermitian(a_mat)
    b_mat = as_hermitian(b_mat)
    if a_mat.dim != 2 or b_mat.dim != 2:
        raise DomainError("2x2 matrices only")
    if not a > 1:
        raise DomainError("need a > 1")
    if p < 0 or t < 0:
        raise DomainError("p and t must be non-negative")
    _check_pd(a_mat)
    if eigvals_hermitian(b_mat).values[0] < -1e-12 * max(b_mat.norm, 1.0):
        raise DomainError("B must be non-negative definite")
    det_a = a_mat.det()
    ainv_b = a_mat.inv().entries @ b_mat.entries
    body = two_trace_inner(a_mat.trace(), det_a, b_mat.trace(), _tr(ainv_b), _det2(ainv_b),
                           a, p, t, variant)
    lead = math.factorial(p) * math.factorial(t) * det_a ** (-a) * math.exp(mv_gamma_ln(2, a))
    return lead * body
