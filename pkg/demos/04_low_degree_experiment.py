"""
The low-degree experiment end to end
====================================

Truth of degree 30, satellite data on a shell at 12371 km, ground data on a
cap of the Earth's surface, 100 candidates from a log-spaced parameter
grid. Pass ``small`` as the first argument for the 27-candidate desk preset.
"""

import sys

from capselect.experiments import preset, run_experiment, write_run

name = "case1-small" if sys.argv[1:2] == ["small"] else "case1"
for eps1 in (0.001, 0.1):
    cfg = preset(name, eps1=eps1, eps2=0.001)
    art = run_experiment(cfg)
    rep = art.report
    print(f"{name} eps1={eps1}: err_star={rep.err_star:.4f} err_opt={rep.err_opt:.4f} "
          f"err_av={rep.err_av:.4f} err_max={rep.err_max:.4f} bound holds={rep.bound_holds}")
    out = f"demo-out/{name}-eps{eps1:g}"
    write_run(art, out)
    print(f"  tables written to {out}/")
