"""
Certifying quadrature rules on the sphere and on a polar cap
============================================================

Inner products on the cap are replaced by weighted sums over the nodes of a
product rule. This is only legitimate when the rule is exact for every
product of two functions in the reconstruction space. Here we build the
rules used in the low-degree setting and measure how far each one is from
an oracle rule.
"""

import numpy as np

from capselect.field import sample
from capselect.quadrature import CapGeometry, cap_rule, check_exactness, full_sphere_rule
from capselect.sphharm import SphCoeffs, n_coeffs

# ground sphere radius and satellite shell radius, in km
r, R = 6371.0, 12371.0
cap = CapGeometry(r, rho=1.0)
print(f"cap half-angle {np.degrees(cap.half_angle):.1f} deg, area {cap.area:.4e} km^2")

# full-sphere rule for the satellite data: bandwidth 31 is exact to degree 61
sphere = full_sphere_rule(31, R)
print(f"sphere rule: {sphere.size} nodes, Gram defect on V_30 = "
      f"{check_exactness(sphere, 30):.2e}")

# cap rules of decreasing exactness, tested on V_55 (needs exactness 110)
for d in (110, 100, 90):
    rule = cap_rule(cap, d)
    defect = check_exactness(rule, 55)
    print(f"cap rule d={d:3d}: {rule.size:5d} nodes, Gram defect on V_55 = {defect:.2e}")

# the two full-sphere styles integrate a degree-40 polynomial identically
rng = np.random.default_rng(0)
g = SphCoeffs(20, R, rng.standard_normal(n_coeffs(20)))
for style in ("equiangular", "gauss_legendre"):
    rule = full_sphere_rule(21, R, style)
    f = sample(g, rule)
    print(f"{style:15s} ||g||^2 = {f.norm() ** 2:.15f}  (coefficients: "
          f"{np.sum(g.coeffs ** 2):.15f})")
