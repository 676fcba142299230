"""End-to-end synthetic experiment: truth, data, candidate sweep, selection."""
from __future__ import annotations

import logging
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .. import chooser, kernels
from ..field import DiscreteField, NoiseSpec, add_noise, sample
from ..quadrature import CapGeometry, QuadratureRule, cap_rule, check_exactness, full_sphere_rule
from ..sphharm import SphCoeffs
from .config import ExperimentConfig
from .truth import load_egm2008, random_potential

log = logging.getLogger(__name__)

GROUND_STREAM = 1
SATELLITE_STREAM = 2
MAX_DEFECT_DEGREE = 80


@dataclass
class RunArtifacts:
    """All inputs and outputs of one run; see :func:`report.write_run`."""

    config: ExperimentConfig
    truth: SphCoeffs
    sphere_rule: QuadratureRule
    cap_rule: QuadratureRule
    eval_rule: QuadratureRule
    f1_clean: DiscreteField
    f2_clean: DiscreteField
    f1: DiscreteField
    f2: DiscreteField
    epsilon1: float
    params: list[tuple[float, float, float]]
    symbols: list[kernels.KernelSymbols]
    candidates: list[DiscreteField]
    report: chooser.SelectionReport
    err_discrete: np.ndarray
    bound_lhs_l2: float
    bound_rhs_l2: float
    exactness_defect: float
    defect_degree: int
    timings: dict = field(default_factory=dict)


def make_truth(cfg: ExperimentConfig) -> SphCoeffs:
    if cfg.truth_source == "egm2008":
        return load_egm2008(cfg.truth_path, cfg.truth_degree, cfg.r)
    return random_potential(cfg.truth_degree, cfg.decay_exponent, cfg.truth_seed, cfg.r)


def make_rules(cfg: ExperimentConfig):
    """Satellite rule, ground data rule and the rule used to measure errors.

    The error rule is exact for products of the candidate space with itself
    and with the truth, so measured errors are true ``L2`` errors on the cap.
    """
    cap = CapGeometry(cfg.r, cfg.rho)
    sphere = full_sphere_rule(cfg.bandwidth, cfg.R, cfg.sphere_style)
    data = cap_rule(cap, cfg.cap_degree)
    need = 2 * max(cfg.deg_ground, cfg.truth_degree)
    evaluation = data if cfg.cap_degree >= need else cap_rule(cap, need)
    return sphere, data, evaluation


def _build_candidates(cfg, mom, G, data_rule, eval_rule):
    cap = CapGeometry(cfg.r, cfg.rho)

    def one(triple):
        a, at, b = triple
        p = kernels.CandidateParams(a, at, b, cfg.deg_sat, cfg.deg_ground, cfg.r, cfg.R, cap)
        sym = kernels.solve_symbols(p, G)
        coeffs = kernels.candidate_coeffs(sym, mom)
        ev = sample(coeffs, eval_rule)
        da = ev if eval_rule is data_rule else sample(coeffs, data_rule)
        return sym, da, ev

    triples = cfg.parameter_triples()
    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(cfg.n_jobs) as pool:
            results = list(pool.map(one, triples))
    else:
        results = [one(t) for t in triples]
    return triples, [r[0] for r in results], [r[1] for r in results], [r[2] for r in results]


def run_experiment(cfg: ExperimentConfig) -> RunArtifacts:
    """Generate data, build every candidate, select one and score the choice."""
    timings = {}
    t0 = time.perf_counter()
    truth = make_truth(cfg)
    sphere, data_rule, eval_rule = make_rules(cfg)

    f2_clean = sample(truth, sphere)
    f1_clean = sample(truth, data_rule)
    f2 = add_noise(f2_clean, NoiseSpec(cfg.eps2, cfg.noise_seed), SATELLITE_STREAM)
    f1 = add_noise(f1_clean, NoiseSpec(cfg.eps1, cfg.noise_seed), GROUND_STREAM)
    epsilon1 = (f1 - f1_clean).norm()
    timings["data"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", kernels.QuadratureExactnessWarning)
        mom = kernels.data_moments(f2, f1, cfg.deg_sat, cfg.deg_ground, cfg.truth_degree)
    for w in caught:
        log.warning("%s", w.message)
    G = kernels.localization_gram(cfg.deg_ground, CapGeometry(cfg.r, cfg.rho))
    for rule in {id(data_rule): data_rule, id(eval_rule): eval_rule}.values():
        rule.legendre(cfg.deg_ground)
        rule.trig(cfg.deg_ground)
    params, symbols, cands, cands_eval = _build_candidates(cfg, mom, G, data_rule, eval_rule)
    timings["candidates"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rep = chooser.select(cands, f1, cfg.selection_tol)
    timings["selection"] = time.perf_counter() - t0

    truth_eval = f1_clean if eval_rule is data_rule else sample(truth, eval_rule)
    tnorm = truth_eval.norm()
    err = np.array([(c - truth_eval).norm() / tnorm for c in cands_eval])
    rep = rep.with_errors(err)
    lhs, rhs, holds = chooser.verify_theorem(rep, f1_clean, cands[rep.k_opt], epsilon1)
    rep = replace(rep, bound_lhs=lhs, bound_rhs=rhs, bound_holds=holds, epsilon_used=epsilon1)
    d_opt = (f1_clean - cands[rep.k_opt]).norm()
    lhs_l2 = err[rep.k_star] * tnorm
    rhs_l2 = err[rep.k_opt] * tnorm + 2.0 * d_opt + 2.0 * epsilon1
    dnorm = f1_clean.norm()
    err_discrete = np.array([(c - f1_clean).norm() / dnorm for c in cands])

    t0 = time.perf_counter()
    defect_degree = min(cfg.required_cap_exactness // 2, MAX_DEFECT_DEGREE)
    defect = check_exactness(data_rule, defect_degree)
    timings["exactness_check"] = time.perf_counter() - t0

    return RunArtifacts(
        config=cfg, truth=truth, sphere_rule=sphere, cap_rule=data_rule, eval_rule=eval_rule,
        f1_clean=f1_clean, f2_clean=f2_clean, f1=f1, f2=f2, epsilon1=epsilon1,
        params=params, symbols=symbols, candidates=cands, report=rep,
        err_discrete=err_discrete, bound_lhs_l2=float(lhs_l2), bound_rhs_l2=float(rhs_l2),
        exactness_defect=defect, defect_degree=defect_degree, timings=timings)


def seeded_configs(cfg: ExperimentConfig, n_runs: int,
                   vary_truth: bool = False) -> list[ExperimentConfig]:
    """Configs with noise seeds ``noise_seed + i``; random truths optionally follow."""
    out = []
    for i in range(n_runs):
        kw = {"noise_seed": cfg.noise_seed + i}
        if vary_truth and cfg.truth_source == "random":
            kw["truth_seed"] = cfg.truth_seed + i
        out.append(cfg.with_overrides(**kw))
    return out


def run_many(cfg: ExperimentConfig, n_runs: int, vary_truth: bool = False) -> list[RunArtifacts]:
    return [run_experiment(c) for c in seeded_configs(cfg, n_runs, vary_truth)]
