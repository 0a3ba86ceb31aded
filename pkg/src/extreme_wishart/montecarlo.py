"""Seeded Monte Carlo samplers and empirical c.d.f. comparison.

Random streams are addressed by ``(seed, stream, chunk)``: samples are drawn
in fixed-size chunks, chunk ``c`` of stream ``s`` always comes from the same
substream, and chunks are concatenated in order. Output is therefore
identical whatever the number of worker threads.

Gamma-Wishart realization: the law of ``V = (Xh + Xb)^H (Xh + Xb)`` depends
on ``Xb`` only through its Gram matrix ``Xb^H Xb`` (given ``Xb``, ``V`` is
non-central Wishart with non-centrality ``Sigma^-1 Xb^H Xb``). We draw the
Gram matrix ``G ~ Gamma_m(alpha, Omega)`` as a complex Wishart with ``alpha``
degrees of freedom and covariance ``Omega^-1`` and take ``Xb`` to be the
Hermitian square root of ``G`` padded with ``n - m`` zero rows.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InvalidDOF
from .hermitian import cholesky_lower

CHUNK = 50_000


@dataclass(frozen=True)
class RngSpec:
    seed: int = 0
    stream: int = 0

    def generator(self, chunk: int = 0) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed) & (2**64 - 1),
                                    spawn_key=(int(self.stream), int(chunk)))
        return np.random.Generator(np.random.PCG64(ss))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard circular complex Gaussian ``CN(0, 1)`` by Box-Muller.

    Each real and imaginary part has variance 1/2, so ``E|z|^2 = 1``.
    """
    u1 = 1.0 - rng.random(shape)  # (0, 1]
    u2 = rng.random(shape)
    r = np.sqrt(-np.log(u1))  # sqrt(-2 ln u) / sqrt(2)
    return r * np.exp(2j * np.pi * u2)


def _batched_eigvalsh(w: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a stack of Hermitian matrices."""
    if w.shape[-1] == 2:
        p = w[:, 0, 0].real
        q = w[:, 1, 1].real
        half = np.hypot((p - q) / 2.0, np.abs(w[:, 0, 1]))
        mid = (p + q) / 2.0
        hi = mid + half
        det = p * q - np.abs(w[:, 0, 1]) ** 2
        lo = np.where(hi > 0, det / np.where(hi > 0, hi, 1.0), mid - half)
        return np.stack([lo, hi], axis=1)
    return np.linalg.eigvalsh(w)


def _extreme(eigs, which):
    if which == "min":
        return eigs[:, 0]
    if which == "max":
        return eigs[:, -1]
    if which == "both":
        return eigs[:, [0, -1]]
    raise ValueError(f"which must be 'min', 'max' or 'both', got {which!r}")


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    sorted_samples: np.ndarray

    def __init__(self, samples):
        s = np.sort(np.asarray(samples, dtype=float).reshape(-1))
        if s.size < 1:
            raise ValueError("need at least one sample")
        s.setflags(write=False)
        object.__setattr__(self, "sorted_samples", s)

    @property
    def count(self) -> int:
        return self.sorted_samples.size

    def __call__(self, x):
        return np.searchsorted(self.sorted_samples, np.asarray(x, dtype=float), side="right") / self.count

    def quantile(self, q: float) -> float:
        return float(np.quantile(self.sorted_samples, q))


@dataclass(frozen=True, eq=False)
class CdfCurve:
    grid: np.ndarray
    values: np.ndarray

    def __init__(self, grid, values):
        g = np.asarray(grid, dtype=float).reshape(-1)
        v = np.asarray(values, dtype=float).reshape(-1)
        if g.shape != v.shape:
            raise ValueError("grid and values must have the same length")
        if g.size > 1 and np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        if v.size > 1 and np.any(np.diff(v) < -1e-10):
            raise ValueError("c.d.f. values must be non-decreasing")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)


def sup_distance(curve: CdfCurve, emp: EmpiricalCdf) -> float:
    """``max_x |F(x) - F_emp(x)|`` over the curve's grid points."""
    return float(np.max(np.abs(curve.values - emp(curve.grid))))


def ks_two_sample(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = a.sorted_samples if isinstance(a, EmpiricalCdf) else np.asarray(a)
    b = b.sorted_samples if isinstance(b, EmpiricalCdf) else np.asarray(b)
    return float(stats.ks_2samp(a, b).statistic)


def _run_chunks(count, rng, draw, workers):
    sizes = [min(CHUNK, count - start) for start in range(0, count, CHUNK)]
    jobs = [(c, size) for c, size in enumerate(sizes)]

    def one(job):
        c, size = job
        return draw(rng.generator(c), size)

    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(job) for job in jobs]
    return np.concatenate(parts, axis=0)


def wishart_gram(rng, count, dof, chol_cov, mean=None):
    """Stack of ``X^H X`` with ``X = mean + Z L^H``, ``Z`` an ``dof x m`` CN(0,1) array."""
    m = chol_cov.shape[0]
    z = complex_normal(rng, (count, dof, m))
    x = z @ chol_cov.conj().T
    if mean is not None:
        x = x + mean
    return np.conj(np.swapaxes(x, 1, 2)) @ x


def sample_ncw_matrices(model, count: int, rng: RngSpec):
    chol = cholesky_lower(model.sigma)
    ups = np.asarray(model.upsilon)

    def draw(g, size):
        return wishart_gram(g, size, model.n, chol, ups)

    return _run_chunks(count, rng, draw, workers=None)


def sample_ncw_eigs(model, which: str, count: int, rng: RngSpec = RngSpec(), workers=None):
    """Extreme eigenvalues of ``W = X^H X``, ``X ~ CN(Upsilon, I_n (x) Sigma)``.

    Returns an :class:`EmpiricalCdf` (or an ``(count, 2)`` array for ``which='both'``).
    """
    if model.m < 2:
        raise InvalidDOF("sampler needs m >= 2")
    if count < 1:
        raise ValueError("count must be >= 1")
    chol = cholesky_lower(model.sigma)
    ups = np.asarray(model.upsilon)

    def draw(g, size):
        return _extreme(_batched_eigvalsh(wishart_gram(g, size, model.n, chol, ups)), which)

    out = _run_chunks(count, rng, draw, workers)
    return out if which == "both" else EmpiricalCdf(out)


def _hermitian_sqrt(g):
    vals, vecs = np.linalg.eigh(g)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)[:, None, :]) @ np.conj(np.swapaxes(vecs, 1, 2))


def gamma_wishart_matrices(g, size, model, chol_sigma, chol_omega_inv):
    m, n, alpha = model.m, model.n, model.alpha
    gram = wishart_gram(g, size, alpha, chol_omega_inv)
    xbar = np.zeros((size, n, m), dtype=complex)
    xbar[:, :m, :] = _hermitian_sqrt(gram)
    xhat = complex_normal(g, (size, n, m)) @ chol_sigma.conj().T
    xt = xhat + xbar
    return np.conj(np.swapaxes(xt, 1, 2)) @ xt


def sample_gw_eigs(model, which: str, count: int, rng: RngSpec = RngSpec(), workers=None):
    """Extreme eigenvalues of gamma-Wishart ``V`` (integer ``alpha >= m``)."""
    if int(model.alpha) != model.alpha or model.alpha < model.m:
        raise InvalidDOF(f"sampler needs integer alpha >= m, got alpha={model.alpha}")
    if count < 1:
        raise ValueError("count must be >= 1")
    chol_sigma = cholesky_lower(model.sigma)
    chol_oi = cholesky_lower(model.omega.inv())

    def draw(g, size):
        v = gamma_wishart_matrices(g, size, model, chol_sigma, chol_oi)
        return _extreme(_batched_eigvalsh(v), which)

    out = _run_chunks(count, rng, draw, workers)
    return out if which == "both" else EmpiricalCdf(out)


def sample_central_wishart_eigs(sigma, n: int, which: str, count: int,
                                rng: RngSpec = RngSpec(), workers=None):
    """Extreme eigenvalues of a central complex Wishart ``W_m(n, Sigma)``."""
    chol = cholesky_lower(sigma)

    def draw(g, size):
        return _extreme(_batched_eigvalsh(wishart_gram(g, size, n, chol)), which)

    out = _run_chunks(count, rng, draw, workers)
    return out if which == "both" else EmpiricalCdf(out)


def ks_radius(count: int, confidence: float = 0.99) -> float:
    """Asymptotic one-sample Kolmogorov-Smirnov radius at ``confidence``."""
    return float(stats.kstwobign.ppf(confidence) / math.sqrt(count))
