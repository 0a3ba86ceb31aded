"""Exact extreme-eigenvalue c.d.f.s of complex correlated non-central Wishart
and gamma-Wishart matrices, with Monte Carlo samplers to check them.

Typical use::

    from extreme_wishart import NoncentralWishartModel, presets, noncentral
    model = NoncentralWishartModel(presets.fig_covariance(2), presets.rank_one_mean(2, 2))
    noncentral.min_cdf(model, 1.5)
"""

from . import gamma_wishart, kernels, montecarlo, noncentral, oracles, presets, special
from .diagnostics import Diagnostics, adaptive_sum, clamp_probability
from .errors import (
    DegenerateEigenvalues,
    DomainError,
    ExtremeWishartError,
    InsufficientAcceptance,
    InvalidDOF,
    NoConvergence,
    NotHermitian,
    NotPositiveDefinite,
    NotRankOne,
    OrderMismatch,
    PrecisionLoss,
    RegimeUnsupported,
    Singular,
    UnsupportedShape,
)
from .gamma_wishart import GammaWishartModel
from .hermitian import EigenPair, HermitianMatrix, cholesky_lower, det_trace_inv, eigvals_hermitian, rank_one_factor
from .jets import TaylorJet
from .montecarlo import CdfCurve, EmpiricalCdf, RngSpec, sup_distance
from .noncentral import NoncentralWishartModel
from .special import SeriesOptions

__version__ = "0.1.0"

__all__ = [
    "CdfCurve", "DegenerateEigenvalues", "Diagnostics", "DomainError", "EigenPair", "EmpiricalCdf",
    "ExtremeWishartError", "GammaWishartModel", "HermitianMatrix", "InsufficientAcceptance",
    "InvalidDOF", "NoConvergence", "NoncentralWishartModel", "NotHermitian", "NotPositiveDefinite",
    "NotRankOne", "OrderMismatch", "PrecisionLoss", "RegimeUnsupported", "RngSpec", "SeriesOptions",
    "Singular", "TaylorJet", "UnsupportedShape", "adaptive_sum", "cholesky_lower", "clamp_probability",
    "det_trace_inv", "eigvals_hermitian", "gamma_wishart", "kernels", "montecarlo", "noncentral",
    "oracles", "presets", "rank_one_factor", "special", "sup_distance",
]
