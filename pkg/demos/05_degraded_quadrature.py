"""
Sensitivity to the exactness of the cap rule
============================================

Selection relies on the cap rule reproducing L2 inner products. This script
reruns the low-degree setting with rules below the required exactness of
110, once for a flat random spectrum and once for a decaying one, and
prints how the chosen error compares with the average candidate.
"""

from capselect.experiments import preset, run_experiment

for decay in (0.0, 2.0):
    for d in (110, 100, 90):
        cfg = preset("case1", decay_exponent=decay, cap_exactness=d, scenario="custom")
        rep = run_experiment(cfg).report
        print(f"decay {decay:.0f}, exactness {d}: err_star={rep.err_star:.4f} "
              f"err_opt={rep.err_opt:.4f} err_av={rep.err_av:.4f}")
