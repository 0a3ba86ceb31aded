"""Small complex Hermitian matrices (dimension 2 to 4).

Every covariance, non-centrality and lemma argument in the package is carried
by :class:`HermitianMatrix`. The matrices are tiny, so the routines here favour
exact structure and robustness (closed forms for 2x2, cyclic Jacobi sweeps for
3x3 and 4x4) over asymptotic speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotHermitian, NotPositiveDefinite, NotRankOne, Singular

ASYMMETRY_GATE = 1e-12
JACOBI_TOL = 1e-13
MAX_DIM = 4


def _fro(a):
    return math.hypot(*np.abs(a).ravel())


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Immutable complex Hermitian matrix.

    The constructor symmetrizes its input through ``(M + M^H) / 2`` and stores
    the removed asymmetry. Inputs whose asymmetry exceeds ``1e-12 * ||M||`` are
    rejected, as are non-finite entries.
    """

    entries: np.ndarray
    asymmetry: float = 0.0

    def __init__(self, entries, *, max_dim: int = MAX_DIM):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise NotHermitian(f"expected a square matrix, got shape {a.shape}")
        if not 1 <= a.shape[0] <= max_dim:
            raise NotHermitian(f"dimension {a.shape[0]} outside 1..{max_dim}")
        if not np.all(np.isfinite(a)):
            raise NotHermitian("matrix has non-finite entries")
        scale = _fro(a)
        asym = _fro(a - a.conj().T) / 2.0
        if asym > ASYMMETRY_GATE * max(scale, np.finfo(float).tiny):
            raise NotHermitian(f"asymmetry {asym:.3e} exceeds gate for norm {scale:.3e}")
        h = (a + a.conj().T) / 2.0
        h[np.diag_indices_from(h)] = h.diagonal().real
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)
        object.__setattr__(self, "asymmetry", asym)

    # construction helpers -------------------------------------------------
    @classmethod
    def diag(cls, values) -> HermitianMatrix:
        return cls(np.diag(np.asarray(values, dtype=float)))

    @classmethod
    def identity(cls, m: int) -> HermitianMatrix:
        return cls(np.eye(m))

    @classmethod
    def outer(cls, v, scale: float = 1.0) -> HermitianMatrix:
        """``scale * v v^H``."""
        v = np.asarray(v, dtype=complex).reshape(-1)
        return cls(scale * np.outer(v, v.conj()))

    # basic views ----------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def norm(self) -> float:
        """Frobenius norm."""
        return _fro(self.entries)

    def __array__(self, dtype=None, copy=None):
        return np.array(self.entries, dtype=dtype)

    def __repr__(self):
        return f"HermitianMatrix({np.array2string(self.entries, precision=6)})"

    def __eq__(self, other):
        if not isinstance(other, HermitianMatrix):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __add__(self, other):
        return HermitianMatrix(self.entries + np.asarray(other))

    def __sub__(self, other):
        return HermitianMatrix(self.entries - np.asarray(other))

    def __mul__(self, c):
        return HermitianMatrix(self.entries * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return HermitianMatrix(-self.entries)

    def trace(self) -> float:
        return float(self.entries.trace().real)

    def det(self) -> float:
        return det_trace_inv(self, need_inverse=False)[0]

    def inv(self) -> HermitianMatrix:
        return det_trace_inv(self)[2]

    def eigvalsh(self) -> np.ndarray:
        return eigvals_hermitian(self).values

    def is_positive_definite(self) -> bool:
        try:
            cholesky_lower(self)
        except NotPositiveDefinite:
            return False
        return True

    def congruence(self, a) -> HermitianMatrix:
        """``A M A^H`` for a square ``A``."""
        a = np.asarray(a)
        return HermitianMatrix(a @ self.entries @ a.conj().T)


class EigenPair(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def _eig2(a):
    # solve at unit scale (exact power-of-two shift) so the determinant neither
    # underflows nor overflows
    peak = float(np.max(np.abs(a)))
    if peak == 0.0:
        return EigenPair(np.zeros(2), np.eye(2, dtype=complex))
    e = math.frexp(peak)[1]
    pair = _eig2_unit(np.ldexp(a.real, -e) + 1j * np.ldexp(a.imag, -e))
    return EigenPair(np.ldexp(pair.values, e), pair.vectors)


def _eig2_unit(a):
    p, q = a[0, 0].real, a[1, 1].real
    b = a[0, 1]
    half_gap = np.hypot((p - q) / 2.0, abs(b))
    mid = (p + q) / 2.0
    lo, hi = mid - half_gap, mid + half_gap
    # the smaller eigenvalue by cancellation is recovered from the determinant
    det = p * q - abs(b) ** 2
    if abs(lo) < abs(hi) and hi != 0.0:
        lo = det / hi
    elif hi != 0.0 and lo != 0.0 and abs(hi) < abs(lo):
        hi = det / lo
    values = np.array([lo, hi])
    if abs(b) == 0.0:
        vecs = np.eye(2, dtype=complex) if p <= q else np.array([[0, 1], [1, 0]], dtype=complex)
        return EigenPair(np.sort(values), vecs)
    vecs = np.empty((2, 2), dtype=complex)
    for k, lam in enumerate(values):
        # (A - lam I) v = 0 using whichever row is better conditioned
        if abs(p - lam) >= abs(q - lam):
            v = np.array([b, lam - p])
        else:
            v = np.array([lam - q, b.conjugate()])
        vecs[:, k] = v / np.linalg.norm(v)
    return EigenPair(values, vecs)


def _jacobi(a, tol=JACOBI_TOL, max_sweeps=60):
    a = np.array(a, dtype=complex)
    m = a.shape[0]
    v = np.eye(m, dtype=complex)
    scale = max(_fro(a), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(sum(abs(a[i, j]) ** 2 for i in range(m) for j in range(m) if i != j))
        if off < tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                theta = 0.5 * np.arctan2(2.0 * r, (a[q, q] - a[p, p]).real)
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(m, dtype=complex)
                rot[p, p] = c
                rot[q, q] = c
                rot[p, q] = s * phase
                rot[q, p] = -s * phase.conjugate()
                a = rot.conj().T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    values = a.diagonal().real
    order = np.argsort(values)
    return EigenPair(values[order], v[:, order])


def eigvals_hermitian(m: HermitianMatrix) -> EigenPair:
    """Ascending eigenvalues and orthonormal eigenvectors.

    2x2 matrices use the quadratic formula on trace and determinant; larger
    ones use cyclic Jacobi sweeps until the off-diagonal mass falls below
    ``1e-13 * ||M||``.
    """
    a = m.entries
    if m.dim == 1:
        return EigenPair(np.array([a[0, 0].real]), np.ones((1, 1), dtype=complex))
    if m.dim == 2:
        pair = _eig2(a)
        order = np.argsort(pair.values)
        return EigenPair(pair.values[order], pair.vectors[:, order])
    return _jacobi(a)


def cholesky_lower(m: HermitianMatrix) -> np.ndarray:
    """Lower-triangular ``L`` with real positive diagonal and ``M = L L^H``."""
    a = m.entries
    n = m.dim
    floor = 1e-14 * m.norm
    low = np.zeros((n, n), dtype=complex)
    for j in range(n):
        pivot = a[j, j].real - np.sum(np.abs(low[j, :j]) ** 2)
        if pivot <= floor:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at column {j}")
        d = np.sqrt(pivot)
        low[j, j] = d
        for i in range(j + 1, n):
            low[i, j] = (a[i, j] - np.sum(low[i, :j] * low[j, :j].conj())) / d
    return low


def _det(a):
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if n == 3:
        return (
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
    return sum((-1) ** j * a[0, j] * _det(np.delete(a[1:], j, axis=1)) for j in range(n))


def _adjugate(a):
    n = a.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    adj = np.empty_like(a)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, j, axis=0), i, axis=1)
            adj[i, j] = (-1) ** (i + j) * _det(minor)
    return adj


def det_trace_inv(m: HermitianMatrix, need_inverse: bool = True):
    """Return ``(det, trace, inverse)``; the inverse is ``None`` when not requested."""
    a = m.entries
    det = float(_det(a).real)
    tr = m.trace()
    if not need_inverse:
        return det, tr, None
    if abs(det) <= 1e-14 * m.norm ** m.dim:
        raise Singular(f"determinant {det:.3e} below threshold")
    inv = HermitianMatrix(_adjugate(a) / det)
    return det, tr, inv


def adjugate(m: HermitianMatrix) -> HermitianMatrix:
    return HermitianMatrix(_adjugate(m.entries))


def rank_one_factor(m: HermitianMatrix, tol: float = 1e-10):
    """Split a rank-one non-negative matrix as ``mu * alpha alpha^H``.

    ``mu`` is the trace and ``alpha`` the unit eigenvector of the top
    eigenvalue. Raises :class:`NotRankOne` when the second-largest eigenvalue
    exceeds ``tol`` times the largest.
    """
    pair = eigvals_hermitian(m)
    vals = pair.values
    top = vals[-1]
    if top <= 0.0:
        raise NotRankOne("matrix has no positive eigenvalue")
    if vals[0] < -tol * top or (m.dim > 1 and abs(vals[-2]) > tol * top):
        raise NotRankOne(f"second eigenvalue {vals[-2]:.3e} vs largest {top:.3e}")
    alpha = pair.vectors[:, -1]
    mu = m.trace()
    resid = _fro(m.entries - mu * np.outer(alpha, alpha.conj()))
    if resid > max(tol, 1e-12) * max(m.norm, 1.0) * 10:
        raise NotRankOne(f"rank-one residual {resid:.3e}")
    return mu, alpha


def as_hermitian(x) -> HermitianMatrix:
    return x if isinstance(x, HermitianMatrix) else HermitianMatrix(x)
