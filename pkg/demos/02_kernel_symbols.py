"""
Kernel symbols for combining satellite and ground data
======================================================

Each candidate reconstruction is defined by two zonal kernels, described by
their degree symbols. The symbols minimize a quadratic functional that
trades off approximating the inverse of upward continuation, keeping the
satellite kernel small, and keeping the ground kernel localized on the cap.
"""

import numpy as np

from capselect.kernels import CandidateParams, functional, localization_gram, solve_symbols
from capselect.quadrature import CapGeometry

r, R = 6371.0, 12371.0
cap = CapGeometry(r, 1.0)
G = localization_gram(80, cap)

# without a cap penalty and without damping the satellite kernel inverts (r/R)^n
free = solve_symbols(CandidateParams(10.0, 10.0, 0.0, 40, 40, r, R, CapGeometry(r, 2.0)))
print("phi[n] * (r/R)^n, n = 0, 10, 20, 40:",
      np.round(free.phi[[0, 10, 20, 40]] * (r / R) ** np.array([0, 10, 20, 40]), 12))

# stronger damping pushes the satellite contribution down and the ground kernel up
print(f"{'beta':>8} {'sum phi^2':>12} {'psi[0]':>8} {'psi[40]':>8} {'psi[80]':>8} {'F':>12}")
for beta in (1e-2, 1.0, 1e3):
    p = CandidateParams(1e4, 1e4, beta, 80, 80, r, R, cap)
    sym = solve_symbols(p, G)
    psi = sym.psi_tilde
    print(f"{beta:8.0e} {np.sum(sym.phi ** 2):12.4e} {psi[0]:8.4f} {psi[40]:8.4f} "
          f"{psi[80]:8.4f} {functional(p, sym.phi, sym.phi_tilde, G):12.4e}")
