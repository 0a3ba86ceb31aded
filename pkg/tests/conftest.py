import numpy as np
import pytest

from extreme_wishart import GammaWishartModel, HermitianMatrix, NoncentralWishartModel
from extreme_wishart.presets import fig_covariance, fig_omega, rank_one_mean


def random_pd(rng, m, scale=1.0, floor=0.3):
    g = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    return HermitianMatrix(scale * (g @ g.conj().T / m + floor * np.eye(m)))


def random_rank_one(rng, m, scale=1.0):
    v = rng.normal(size=m) + 1j * rng.normal(size=m)
    return HermitianMatrix.outer(v / np.linalg.norm(v), scale)


def fig1_model(m, n):
    return NoncentralWishartModel(fig_covariance(m), rank_one_mean(n, m))


def fig2_model(m, n, alpha):
    return GammaWishartModel(fig_covariance(m), fig_omega(m), n, alpha)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
