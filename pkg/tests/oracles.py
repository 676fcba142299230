"""Independent loop-based implementations used as test oracles."""
import numpy as np

from capselect.field import NoiseSpec, add_noise, sample
from capselect.kernels import functional
from capselect.quadrature import CapGeometry, cap_rule
from capselect.sphharm import SphCoeffs, n_coeffs


def inner(w, a, b):
    total = 0.0
    for wi, ai, bi in zip(w, a, b):
        total += wi * ai * bi
    return total


def brute_select(U, f, w, tol=1e-12):
    """Scores over all ordered pairs k != l, written straight from the definitions."""
    N = len(U)
    norms = [np.sqrt(inner(w, u, u)) for u in U]
    threshold = tol * max(norms)
    dirs = []
    for k in range(N):
        for l in range(N):
            if k == l:
                continue
            d = U[k] - U[l]
            dn = np.sqrt(inner(w, d, d))
            if dn > threshold:
                dirs.append(d / dn)
    H = []
    for k in range(N):
        best = 0.0
        for a in dirs:
            best = max(best, abs(inner(w, U[k], a) - inner(w, f, a)))
        H.append(best)
    H = np.array(H)
    k_star = min(range(N), key=lambda k: (H[k], k))
    return H, k_star


def random_instance(seed, degree=3, n_candidates=5, rho=1.0, noise=0.05):
    """Truth, candidates and noisy data in V_degree on a certified cap rule."""
    rng = np.random.default_rng(seed)
    rule = cap_rule(CapGeometry(6371.0, rho), 2 * degree)
    truth_c = SphCoeffs(degree, 6371.0, rng.standard_normal(n_coeffs(degree)))
    truth = sample(truth_c, rule)
    cands = []
    for k in range(n_candidates):
        pert = rng.standard_normal(n_coeffs(degree)) * rng.uniform(0.01, 1.0)
        cands.append(sample(SphCoeffs(degree, 6371.0, truth_c.coeffs + pert), rule))
    f = add_noise(truth, NoiseSpec(noise, seed))
    return rule, truth, cands, f


def fd_gradient(p, phi, phi_tilde, G):
    v = np.concatenate([phi, phi_tilde])
    Ns = phi.size
    g = np.empty_like(v)
    for i in range(v.size):
        h = 1e-4 * max(1.0, abs(v[i]))
        vp, vm = v.copy(), v.copy()
        vp[i] += h
        vm[i] -= h
        g[i] = (functional(p, vp[:Ns], vp[Ns:], G) - functional(p, vm[:Ns], vm[Ns:], G)) / (2 * h)
    return g
