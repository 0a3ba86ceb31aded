"""Monte Carlo oracles for the matrix integrals in :mod:`.kernels`.

Both estimators are deliberately naive and share no code with the closed
forms they check.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InsufficientAcceptance, InvalidDOF
from .hermitian import as_hermitian, cholesky_lower
from .montecarlo import RngSpec, complex_normal
from .special import mv_gamma_ln

DEFAULT_SAMPLES = 200_000


def _batched_trace(x):
    return np.trace(x, axis1=-2, axis2=-1).real


def mc_expectation_oracle(a_mat, a: int, f, samples: int = DEFAULT_SAMPLES, seed: int = 0):
    """Estimate ``int_{X>0} etr(-AX) |X|^(a-m) f(X) dX``.

    ``X = G^H G`` with ``G`` an ``a x m`` complex Gaussian whose rows have
    covariance ``A^-1``, so the integral is ``Gamma~_m(a) |A|^-a E[f(X)]``.
    ``f`` maps an ``(N, m, m)`` stack to ``N`` values. Returns ``(mean, stderr)``
    of the integral estimate.
    """
    a_mat = as_hermitian(a_mat)
    m = a_mat.dim
    if int(a) != a or a < m:
        raise InvalidDOF(f"oracle needs an integer a >= m, got a={a}, m={m}")
    chol = cholesky_lower(a_mat.inv())
    rng = RngSpec(seed).generator()
    g = complex_normal(rng, (samples, int(a), m)) @ chol.conj().T
    x = np.conj(np.swapaxes(g, 1, 2)) @ g
    vals = np.asarray(f(x), dtype=float)
    norm = math.exp(mv_gamma_ln(m, a)) * a_mat.det() ** (-a)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.inf
    return norm * mean, norm * stderr


def mc_region_oracle(a_mat, b_mat, a: float, p: int, samples: int = DEFAULT_SAMPLES, seed: int = 0):
    """Estimate ``int_{0<X<I_2} |X|^(a-2) etr(AX) tr^p(BX) dX`` by rejection.

    Proposals are uniform on the box ``x11, x22 in (0,1)``,
    ``Re x12, Im x12 in (-1/2, 1/2)`` (volume 1, containing the matrix
    interval in the four real coordinates of a 2x2 Hermitian matrix) and are
    accepted when both eigenvalues lie in ``(0, 1)``.
    """
    a_mat = as_hermitian(a_mat)
    b_mat = as_hermitian(b_mat)
    if not a > 1:
        raise ValueError("need a > 1")
    rng = RngSpec(seed).generator()
    u = rng.random((samples, 4))
    x11, x22 = u[:, 0], u[:, 1]
    x12 = (u[:, 2] - 0.5) + 1j * (u[:, 3] - 0.5)
    det = x11 * x22 - np.abs(x12) ** 2
    # I - X must also be positive definite
    det_c = (1 - x11) * (1 - x22) - np.abs(x12) ** 2
    inside = (det > 0) & (det_c > 0) & (x11 < 1) & (x22 < 1)
    rate = inside.mean()
    if rate < 1e-3:
        raise InsufficientAcceptance(f"acceptance rate {rate:.2e}")
    x = np.zeros((samples, 2, 2), dtype=complex)
    x[:, 0, 0] = x11
    x[:, 1, 1] = x22
    x[:, 0, 1] = x12
    x[:, 1, 0] = np.conj(x12)
    am = a_mat.entries
    bm = b_mat.entries
    tr_ax = _batched_trace(am @ x)
    tr_bx = _batched_trace(bm @ x)
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = np.where(inside, np.abs(det) ** (a - 2) * np.exp(tr_ax) * tr_bx**p, 0.0)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples))
    return mean, stderr
