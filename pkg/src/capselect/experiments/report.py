"""CSV reports and plot data for experiment runs.

Every CSV uses a single header line, comma separators, 17 significant
digits, UTF-8 and LF line endings. Wall-clock timings go to a separate JSON
file so the CSVs of repeated runs are byte-identical.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..quadrature import write_csv
from .runner import RunArtifacts
from .truth import export_egm2008

CANDIDATE_HEADER = ["k", "alpha", "alpha_tilde", "beta", "H_k", "err_k", "err_k_discrete",
                    "is_star", "is_opt"]
SUMMARY_HEADER = ["scenario", "n_candidates", "k_star", "k_opt", "err_star", "err_opt",
                  "err_max", "err_av", "eps1", "eps2", "epsilon_abs", "bound_lhs",
                  "bound_rhs", "bound_holds", "bound_lhs_l2", "bound_rhs_l2",
                  "cap_exactness", "required_exactness", "defect_degree", "exactness_defect"]
PLOT_HEADER = ["run", "err_star", "err_opt", "err_max", "err_av", "eps1"]


def summary_row(art: RunArtifacts) -> list:
    rep, cfg = art.report, art.config
    return [cfg.scenario, len(rep.H), rep.k_star, rep.k_opt, rep.err_star, rep.err_opt,
            rep.err_max, rep.err_av, cfg.eps1, cfg.eps2, art.epsilon1, rep.bound_lhs,
            rep.bound_rhs, rep.bound_holds, art.bound_lhs_l2, art.bound_rhs_l2,
            cfg.cap_degree, cfg.required_cap_exactness, art.defect_degree,
            art.exactness_defect]


def report_csv(art: RunArtifacts, out_dir) -> dict[str, Path]:
    """Write candidate table, summary and single-run plot data."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rep = art.report
    rows = [(k, a, at, b, rep.H[k], rep.err_k[k], art.err_discrete[k],
             k == rep.k_star, k == rep.k_opt)
            for k, (a, at, b) in enumerate(art.params)]
    paths = {"candidates": out / "candidates.csv", "summary": out / "summary.csv",
             "plot_data": out / "plot_data.csv"}
    write_csv(paths["candidates"], CANDIDATE_HEADER, rows)
    write_csv(paths["summary"], SUMMARY_HEADER, [summary_row(art)])
    write_csv(paths["plot_data"], PLOT_HEADER,
              [[0, rep.err_star, rep.err_opt, rep.err_max, rep.err_av, art.config.eps1]])
    return paths


def write_run(art: RunArtifacts, out_dir, save_fields: bool = True) -> dict[str, Path]:
    """Write the reports plus everything needed to audit or repeat the run."""
    out = Path(out_dir)
    paths = report_csv(art, out)
    art.config.save(out / "config.txt")
    export_egm2008(art.truth, out / "truth.txt")
    sym_rows = []
    for k, sym in enumerate(art.symbols):
        phi = np.zeros(sym.deg_ground + 1)
        phi[: sym.deg_sat + 1] = sym.phi
        for n in range(sym.deg_ground + 1):
            sym_rows.append((k, n, phi[n], sym.phi_tilde[n], sym.psi_tilde[n]))
    write_csv(out / "symbols.csv", ["k", "n", "phi", "phi_tilde", "psi_tilde"], sym_rows)
    if save_fields:
        art.sphere_rule.to_csv(out / "sphere_rule.csv")
        art.cap_rule.to_csv(out / "cap_rule.csv")
        art.f1.to_csv(out / "f1.csv")
        art.f2.to_csv(out / "f2.csv")
    (out / "timings.json").write_text(json.dumps(art.timings, indent=2) + "\n", encoding="utf-8")
    return paths


def read_summary(path) -> dict:
    with open(path, encoding="utf-8", newline="") as fh:
        row = next(csv.DictReader(fh))
    out = {}
    for key, value in row.items():
        if key == "scenario":
            out[key] = value
        elif value in ("true", "false"):
            out[key] = value == "true"
        else:
            out[key] = float(value)
    return out


def collect_runs(root) -> list[Path]:
    """Run directories under ``root`` (itself or ``run_*`` children), sorted."""
    root = Path(root)
    if (root / "summary.csv").exists():
        return [root]
    return sorted(p for p in root.glob("run_*") if (p / "summary.csv").exists())


def write_plot_data(run_dirs, path) -> list[dict]:
    """One row per run: the error series plotted against the run index."""
    summaries = [read_summary(Path(d) / "summary.csv") for d in run_dirs]
    rows = [[i, s["err_star"], s["err_opt"], s["err_max"], s["err_av"], s["eps1"]]
            for i, s in enumerate(summaries)]
    write_csv(path, PLOT_HEADER, rows)
    return summaries


def format_summary(summaries: list[dict]) -> str:
    lines = [f"{'run':>4} {'err_star':>11} {'err_opt':>11} {'err_av':>11} {'err_max':>11} bound"]
    for i, s in enumerate(summaries):
        flag = "ok" if s["bound_holds"] else "VIOLATED"
        lines.append(f"{i:>4} {s['err_star']:11.4e} {s['err_opt']:11.4e} "
                     f"{s['err_av']:11.4e} {s['err_max']:11.4e} {flag}")
    return "\n".join(lines)
