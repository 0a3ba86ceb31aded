"""Truncated Taylor series ("jets") at y = 0.

A jet of order p stores the Taylor coefficients ``c_0..c_p`` of
``f(y) = sum_j c_j y^j + O(y^(p+1))``. Derivatives are recovered as
``f^(j)(0) = j! c_j``. Jets carry every y-derivative the integral kernels
need without any symbolic differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OrderMismatch
from .special import DEFAULT_OPTIONS, SeriesOptions, kummer_1f1


@dataclass(frozen=True, eq=False)
class TaylorJet:
    coeffs: np.ndarray

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(c)):
            raise ValueError("jet coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def constant(cls, value: float, order: int) -> TaylorJet:
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def linear(cls, c0: float, c1: float, order: int) -> TaylorJet:
        c = np.zeros(order + 1)
        c[0] = c0
        if order >= 1:
            c[1] = c1
        return cls(c)

    @classmethod
    def from_derivatives(cls, derivs) -> TaylorJet:
        return cls([d / math.factorial(j) for j, d in enumerate(derivs)])

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def derivatives(self) -> np.ndarray:
        return np.array([c * math.factorial(j) for j, c in enumerate(self.coeffs)])

    def derivative(self, j: int) -> float:
        return float(self.coeffs[j] * math.factorial(j))

    def __add__(self, other):
        return jet_add(self, other)

    def __sub__(self, other):
        return jet_add(self, jet_scale(other, -1.0))

    def __mul__(self, other):
        if isinstance(other, TaylorJet):
            return jet_mul(self, other)
        return jet_scale(self, other)

    __rmul__ = __mul__

    def __repr__(self):
        return f"TaylorJet({self.coeffs.tolist()})"


def _same_order(*jets):
    orders = {j.order for j in jets}
    if len(orders) != 1:
        raise OrderMismatch(f"jets of different orders {sorted(orders)}")
    return orders.pop()


def jet_add(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    _same_order(f, g)
    return TaylorJet(f.coeffs + g.coeffs)


def jet_scale(f: TaylorJet, c: float) -> TaylorJet:
    return TaylorJet(f.coeffs * c)


def jet_mul(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    """Cauchy product truncated at the common order."""
    p = _same_order(f, g)
    return TaylorJet(np.convolve(f.coeffs, g.coeffs)[: p + 1])


def jet_div(f: TaylorJet, g: TaylorJet) -> TaylorJet:
    """Series quotient ``f / g`` (needs ``g_0 != 0``)."""
    p = _same_order(f, g)
    if g.coeffs[0] == 0.0:
        raise ZeroDivisionError("jet division by a series with zero constant term")
    out = np.zeros(p + 1)
    for j in range(p + 1):
        out[j] = (f.coeffs[j] - np.dot(out[:j], g.coeffs[j:0:-1])) / g.coeffs[0]
    return TaylorJet(out)


def jet_compose_1f1(a: float, b: float, base: float, inner: TaylorJet,
                    opts: SeriesOptions = DEFAULT_OPTIONS) -> TaylorJet:
    """Jet of ``1F1(a; b; inner(y))`` expanded around ``base = inner(0)``.

    Uses ``d^j/dz^j 1F1(a; b; z) = (a)_j/(b)_j 1F1(a + j; b + j; z)`` and
    composes the resulting Taylor polynomial with ``inner - base``, whose
    constant term vanishes.
    """
    p = inner.order
    if abs(inner.coeffs[0] - base) > 1e-12 * max(1.0, abs(base)):
        raise ValueError("base must equal the constant term of the inner jet")
    delta = np.array(inner.coeffs, dtype=float)
    delta[0] = 0.0
    out = np.zeros(p + 1)
    power = np.zeros(p + 1)
    power[0] = 1.0
    ratio = 1.0  # (a)_j / (b)_j / j!
    for j in range(p + 1):
        if j > 0:
            ratio *= (a + j - 1) / ((b + j - 1) * j)
            power = np.convolve(power, delta)[: p + 1]
        out += ratio * kummer_1f1(a + j, b + j, base, opts) * power
    return TaylorJet(out)


def jet_compose_exp(inner: TaylorJet) -> TaylorJet:
    """Jet of ``exp(inner(y))``."""
    p = inner.order
    delta = np.array(inner.coeffs, dtype=float)
    delta[0] = 0.0
    out = np.zeros(p + 1)
    power = np.zeros(p + 1)
    power[0] = 1.0
    for j in range(p + 1):
        if j > 0:
            power = np.convolve(power, delta)[: p + 1] / j
        out += power
    return TaylorJet(math.exp(inner.coeffs[0]) * out)
