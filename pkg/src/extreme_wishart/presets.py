"""Built-in parameter generators for the reference experiments.

* :func:`fig_covariance` -- ``Sigma_jk = exp(-pi^3/32 (j-k)^2)``
* :func:`fig_omega` -- ``Omega_jk = exp(-0.7 (j-k) i pi) exp(-147 pi^3/4000 (j-k)^2)``
* :func:`rank_one_mean` -- ``Upsilon = a^H b`` with ``a_j = exp(2 i j pi cos theta)``
"""

from __future__ import annotations

import math

import numpy as np

from .hermitian import HermitianMatrix


def _offsets(m: int) -> np.ndarray:
    idx = np.arange(m)
    return idx[:, None] - idx[None, :]


def fig_covariance(m: int) -> HermitianMatrix:
    d = _offsets(m)
    return HermitianMatrix(np.exp(-(math.pi**3) / 32.0 * d**2))


def fig_omega(m: int) -> HermitianMatrix:
    d = _offsets(m)
    return HermitianMatrix(np.exp(-0.7j * math.pi * d) * np.exp(-147.0 * math.pi**3 / 4000.0 * d**2))


def steering(length: int, theta: float = math.pi / 4) -> np.ndarray:
    return np.exp(2j * math.pi * math.cos(theta) * np.arange(length))


def rank_one_mean(n: int, m: int, theta: float = math.pi / 4) -> np.ndarray:
    """``n x m`` matrix ``a^H b`` built from two steering rows."""
    a = steering(n, theta)
    b = steering(m, theta)
    return np.outer(a.conj(), b)
