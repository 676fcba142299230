"""Command line interface: ``capselect {check-quadrature,gen-truth,run,report}``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from .errors import ConfigError, DataError, NumericalError
from .experiments import config as cfgmod
from .experiments.report import collect_runs, format_summary, write_plot_data, write_run
from .experiments.runner import run_experiment, seeded_configs
from .experiments.truth import export_egm2008, load_egm2008, random_potential
from .quadrature import CapGeometry, cap_rule, check_exactness, full_sphere_rule

log = logging.getLogger("capselect")


def _cmd_check_quadrature(args) -> int:
    if args.bandwidth is not None:
        rule = full_sphere_rule(args.bandwidth, args.R, args.style)
    else:
        rule = cap_rule(CapGeometry(args.r, args.rho), args.exactness)
    defect = check_exactness(rule, args.degree)
    status = "certified" if defect <= args.tol else "NOT certified"
    print(f"{rule.domain} rule: {rule.size} nodes, declared exactness {rule.exactness_degree}")
    print(f"Gram defect on V_{args.degree}: {defect:.3e} ({status} at tol {args.tol:g})")
    if args.csv:
        rule.to_csv(args.csv)
    return 0


def _cmd_gen_truth(args) -> int:
    if args.source == "egm2008":
        if not args.path:
            raise ConfigError("--path is required for --source egm2008")
        coeffs = load_egm2008(args.path, args.degree, args.r)
    else:
        coeffs = random_potential(args.degree, args.decay, args.seed, args.r)
    export_egm2008(coeffs, args.out)
    print(f"wrote {coeffs.coeffs.size} coefficients to {args.out}")
    return 0


def _build_config(args) -> cfgmod.ExperimentConfig:
    overrides = {}
    for f in fields(cfgmod.ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = cfgmod.parse_value(f.name, value)
    if args.config:
        return cfgmod.load_config(args.config, **overrides)
    return cfgmod.preset(args.preset, **overrides)


def _cmd_run(args) -> int:
    cfg = _build_config(args)
    out = Path(args.output_dir or cfg.output_dir or "capselect-out")
    configs = seeded_configs(cfg, args.runs, args.vary_truth)
    run_dirs = []
    for i, c in enumerate(configs):
        run_dir = out if args.runs == 1 else out / f"run_{i:03d}"
        art = run_experiment(c.with_overrides(output_dir=str(run_dir)))
        write_run(art, run_dir, save_fields=not args.no_fields)
        run_dirs.append(run_dir)
        rep = art.report
        log.info("run %d: k*=%d err_star=%.4e err_opt=%.4e", i, rep.k_star, rep.err_star,
                 rep.err_opt)
    summaries = write_plot_data(run_dirs, out / "plot_data.csv")
    print(format_summary(summaries))
    if not all(s["bound_holds"] for s in summaries):
        return 3
    return 0


def _cmd_report(args) -> int:
    run_dirs = collect_runs(args.run_dir)
    if not run_dirs:
        raise DataError(f"no run directories with summary.csv under {args.run_dir}")
    summaries = write_plot_data(run_dirs, Path(args.run_dir) / "plot_data.csv")
    print(format_summary(summaries))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress")
    parser = argparse.ArgumentParser(prog="capselect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-quadrature", parents=[common], help="certify a cap or sphere rule")
    p.add_argument("--r", type=float, default=6371.0)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--exactness", type=int, default=110)
    p.add_argument("--bandwidth", type=int, help="check a full-sphere rule instead")
    p.add_argument("--R", type=float, default=12371.0)
    p.add_argument("--style", default="equiangular", choices=["equiangular", "gauss_legendre"])
    p.add_argument("--degree", type=int, default=55)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--csv", help="write the rule's nodes and weights here")
    p.set_defaults(func=_cmd_check_quadrature)

    p = sub.add_parser("gen-truth", parents=[common], help="write a reference potential in EGM2008 row format")
    p.add_argument("--source", choices=["random", "egm2008"], default="random")
    p.add_argument("--path", help="EGM2008 coefficient file")
    p.add_argument("--degree", type=int, default=30)
    p.add_argument("--decay", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r", type=float, default=6371.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_truth)

    p = sub.add_parser("run", parents=[common], help="run an experiment preset or config file")
    p.add_argument("--preset", default="case1-small", choices=sorted(cfgmod.PRESETS))
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--runs", type=int, default=1, help="repeat with consecutive noise seeds")
    p.add_argument("--vary-truth", action="store_true",
                   help="advance the random truth seed together with the noise seed")
    p.add_argument("--no-fields", action="store_true", help="skip rule and field CSVs")
    for f in fields(cfgmod.ExperimentConfig):
        p.add_argument("--" + f.name.replace("_", "-"), dest=f.name, metavar="VALUE")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", parents=[common], help="summarize run directories and rebuild plot data")
    p.add_argument("run_dir")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
