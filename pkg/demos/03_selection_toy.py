"""
Choosing among candidates from noisy samples
============================================

A small instance in V_3: a handful of perturbed copies of the truth, noisy
ground samples, and the score H_k of each candidate. The chosen candidate
is compared with the best one, which is only known because the truth is.
"""

import numpy as np

from capselect.chooser import attach_truth, select
from capselect.field import NoiseSpec, add_noise, sample
from capselect.quadrature import CapGeometry, cap_rule
from capselect.sphharm import SphCoeffs, n_coeffs

rng = np.random.default_rng(3)
rule = cap_rule(CapGeometry(6371.0, 1.0), 6)  # exact for products in V_3
truth_c = SphCoeffs(3, 6371.0, rng.standard_normal(n_coeffs(3)))
truth = sample(truth_c, rule)

candidates = []
for size in (1.0, 0.3, 0.05, 0.5, 0.1):
    pert = size * rng.standard_normal(n_coeffs(3))
    candidates.append(sample(SphCoeffs(3, 6371.0, truth_c.coeffs + pert), rule))

f = add_noise(truth, NoiseSpec(0.02, seed=1))
eps = (f - truth).norm()
rep = attach_truth(select(candidates, f), candidates, truth, eps)

print(" k      H_k      err_k")
for k, (h, e) in enumerate(zip(rep.H, rep.err_k)):
    mark = " <- chosen" if k == rep.k_star else ""
    print(f"{k:2d} {h:.4e} {e:.4e}{mark}")
print(f"k* = {rep.k_star}, k_opt = {rep.k_opt}")
print(f"error bound: {rep.bound_lhs:.4e} <= {rep.bound_rhs:.4e} ({rep.bound_holds})")
