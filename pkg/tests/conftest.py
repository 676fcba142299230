import numpy as np
import pytest

from capselect.quadrature import CapGeometry, cap_rule, full_sphere_rule
from capselect.sphharm import SphCoeffs, n_coeffs, sph_harm_matrix

R_GROUND = 6371.0
R_SAT = 12371.0


def brute_cap_gram(cap, L, n_t=200, n_phi=400):
    """Independent oracle: dense Gauss-in-t times rectangle-in-phi product integral."""
    x, w = np.polynomial.legendre.leggauss(n_t)
    half = 0.5 * (1 - cap.t_min)
    t = half * x + 0.5 * (1 + cap.t_min)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    T, P = np.meshgrid(np.arccos(t), phi, indexing="ij")
    W = np.outer(w * half, np.full(n_phi, 2 * np.pi / n_phi)).ravel()
    Y = sph_harm_matrix(L, (T.ravel(), P.ravel()))
    return (Y * W) @ Y.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def cap1():
    return CapGeometry(R_GROUND, 1.0)


def random_coeffs(rng, degree, radius=R_GROUND):
    return SphCoeffs(degree, radius, rng.standard_normal(n_coeffs(degree)))


@pytest.fixture(scope="session")
def small_rules(cap1):
    """Satellite and ground rules certified for degree-6 data and degree-8 kernels."""
    return full_sphere_rule(10, R_SAT), cap_rule(cap1, 20)
