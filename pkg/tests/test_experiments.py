import math
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

from capselect.errors import ConfigError, DataError
from capselect.experiments.config import (
    PRESETS, ExperimentConfig, load_config, log_grid, parse_config_text, preset,
)
from capselect.experiments.report import (
    CANDIDATE_HEADER, PLOT_HEADER, SUMMARY_HEADER, collect_runs, read_summary,
    write_plot_data, write_run,
)
from capselect.experiments.runner import make_rules, run_experiment, run_many, seeded_configs
from capselect.experiments.truth import (
    degree_power, export_egm2008, load_egm2008, random_potential,
)
from capselect.quadrature import check_exactness

FIXTURE = Path(__file__).parent / "data" / "egm_fixture.gfc"
SCALE = math.sqrt(4 * math.pi) * 6371.0


def tiny(**kw):
    base = dict(scenario="custom", truth_degree=6, deg_sat=8, deg_ground=8,
                alpha_grid=(1e2, 1e6), alpha_tilde_grid=(1e1, 1e5), beta_grid=(0.01, 10.0))
    base.update(kw)
    return ExperimentConfig(**base)


# ---- truth models -----------------------------------------------------------

def test_fixture_loads():
    c = load_egm2008(FIXTURE, 1)
    assert c.coeffs.size == 4
    assert c.get(0, 1) == pytest.approx(SCALE)
    assert c.get(1, 1) == pytest.approx(2.5e-6 * SCALE)
    assert c.get(1, 2) == pytest.approx(-1.25e-6 * SCALE)
    assert c.get(1, 3) == pytest.approx(3.75e-7 * SCALE)


def test_fixture_roundtrip(tmp_path):
    c = load_egm2008(FIXTURE, 1)
    out = tmp_path / "back.txt"
    export_egm2008(c, out)
    np.testing.assert_array_equal(load_egm2008(out, 1).coeffs, c.coeffs)
    rows = [line.split() for line in out.read_text().splitlines()]
    assert [r[:2] for r in rows] == [["0", "0"], ["1", "0"], ["1", "1"]]
    assert float(rows[2][3]) == pytest.approx(3.75e-7, rel=1e-15)


def test_truncation_and_missing_degrees():
    assert load_egm2008(FIXTURE, 0).coeffs.size == 1
    with pytest.raises(DataError, match="missing"):
        load_egm2008(FIXTURE, 2)


def test_parse_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 0 1.0 0.0 0 0\n1 0 x 0.0 0 0\n")
    with pytest.raises(DataError, match=":2:"):
        load_egm2008(bad, 1)
    empty = tmp_path / "empty.txt"
    empty.write_text("just a header\n")
    with pytest.raises(DataError, match="no coefficient rows"):
        load_egm2008(empty, 0)


def test_gfc_keyword_column(tmp_path):
    p = tmp_path / "icgem.gfc"
    p.write_text("key n m C S\ngfc 0 0 1.0 0.0 0 0\ngfc 1 0 0.5 0.0 0 0\ngfc 1 1 0.25 -0.5 0 0\n")
    c = load_egm2008(p, 1)
    assert c.get(1, 3) == pytest.approx(-0.5 * SCALE)


@pytest.mark.parametrize("degree,count", [(30, 961), (130, 17161)])
def test_truth_sizes_degree_30_and_130(tmp_path, degree, count):
    path = tmp_path / "model.txt"
    export_egm2008(random_potential(degree, 2.0, 1), path)
    assert load_egm2008(path, degree).coeffs.size == count


def test_random_potential_seeded():
    a, b = random_potential(10, 1.0, 3), random_potential(10, 1.0, 3)
    np.testing.assert_array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, random_potential(10, 1.0, 4).coeffs)
    with pytest.raises(ValueError):
        random_potential(-1)


def test_flat_spectrum_chi_square():
    # pooled over 50 seeds, degree n contributes (2n+1)*50 squared normals
    L = 30
    power = sum(degree_power(random_potential(L, 0.0, s)) for s in range(50))
    dof = (2 * np.arange(L + 1) + 1) * 50
    chi2 = power * dof / 50  # sums of squares per degree
    # homogeneity: each degree's sum of squares ~ chi2(dof)
    pvals = stats.chi2.sf(chi2, dof)
    two_sided = 2 * np.minimum(pvals, 1 - pvals)
    combined = stats.combine_pvalues(two_sided).pvalue
    assert combined > 0.01


def test_decay_spectrum():
    L = 40
    power = np.mean([degree_power(random_potential(L, 2.0, s)) for s in range(50)], axis=0)
    n = np.arange(L + 1)
    slope = np.polyfit(np.log(n + 1), np.log(power), 1)[0]
    assert slope == pytest.approx(-4.0, abs=0.15)


# ---- configuration ----------------------------------------------------------

def test_presets_pin_reference_values():
    c = PRESETS["case1"]
    assert (c.r, c.R, c.rho, c.truth_degree) == (6371.0, 12371.0, 1.0, 30)
    assert (c.deg_sat, c.deg_ground, c.cap_degree, c.n_candidates) == (80, 80, 110, 100)
    assert c.alpha_grid[0] == pytest.approx(10.0) and c.alpha_grid[-1] == pytest.approx(1e8)
    assert c.beta_grid[0] == pytest.approx(0.01) and c.beta_grid[-1] == pytest.approx(1e3)
    c2 = PRESETS["case2"]
    assert (c2.R, c2.rho, c2.truth_degree, c2.deg_ground, c2.cap_degree) == \
        (7071.0, 0.3, 130, 150, 280)
    small = PRESETS["case1-small"]
    assert (small.deg_ground, small.n_candidates) == (40, 27)
    assert PRESETS["case1-degraded"].cap_degree == 90
    assert PRESETS["case1-degraded"].decay_exponent == 0.0


def test_parameter_triple_order():
    c = tiny()
    t = c.parameter_triples()
    assert len(t) == c.n_candidates == 8
    assert t[0] == (1e2, 1e1, 0.01) and t[1] == (1e2, 1e1, 10.0) and t[-1] == (1e6, 1e5, 10.0)


def test_config_text_roundtrip(tmp_path):
    c = preset("case1", eps1=0.1, noise_seed=7)
    path = tmp_path / "cfg.txt"
    c.save(path)
    assert load_config(path) == c


def test_config_parsing():
    vals = parse_config_text("""
        # comment line
        scenario = custom
        rho = 0.5        # trailing comment
        alpha_grid = logspace(1, 8, 5)
        beta_grid = 0.1, 1, 10
        cap_exactness = none
    """)
    assert vals["rho"] == 0.5 and vals["cap_exactness"] is None
    np.testing.assert_allclose(vals["alpha_grid"], log_grid(1, 8, 5))
    assert vals["beta_grid"] == (0.1, 1.0, 10.0)
    with pytest.raises(ConfigError):
        parse_config_text("bogus = 1")
    with pytest.raises(ConfigError):
        parse_config_text("rho 0.5")
    with pytest.raises(ConfigError):
        parse_config_text("deg_sat = many")


@pytest.mark.parametrize("bad", [dict(rho=2.0), dict(R=6000.0), dict(deg_sat=9),
                                 dict(alpha_grid=()), dict(beta_grid=(-1.0,)),
                                 dict(truth_source="egm2008"), dict(n_jobs=0)])
def test_config_validation(bad):
    with pytest.raises(ConfigError):
        tiny(**bad)


def test_default_rules_certified():
    c = tiny()
    sphere, data, ev = make_rules(c)
    assert c.certified
    assert data.exactness_degree == c.deg_ground + c.truth_degree
    assert ev.exactness_degree == 2 * max(c.deg_ground, c.truth_degree)
    assert sphere.exactness_degree >= c.deg_sat + c.truth_degree
    assert check_exactness(data, (c.deg_ground + c.truth_degree) // 2) < 1e-10


# ---- end-to-end -------------------------------------------------------------

def test_run_invariants():
    art = run_experiment(tiny(eps1=0.01))
    rep = art.report
    assert rep.err_opt <= rep.err_star <= rep.err_max
    assert rep.err_opt <= rep.err_av <= rep.err_max
    assert rep.bound_holds
    assert art.epsilon1 == pytest.approx(0.01 * art.f1_clean.norm(), rel=1e-12)
    assert art.exactness_defect < 1e-10
    assert len(art.candidates) == 8 and len(art.symbols) == 8


def test_parallel_equals_serial():
    a = run_experiment(tiny())
    b = run_experiment(tiny(n_jobs=4))
    for u, v in zip(a.candidates, b.candidates):
        assert u.values.tobytes() == v.values.tobytes()
    assert a.report.H.tobytes() == b.report.H.tobytes()


def test_egm_truth_source(tmp_path):
    path = tmp_path / "model.txt"
    export_egm2008(random_potential(6, 2.0, 5), path)
    art = run_experiment(tiny(truth_source="egm2008", truth_path=str(path)))
    np.testing.assert_allclose(art.truth.coeffs, random_potential(6, 2.0, 5).coeffs,
                               rtol=1e-15)


def test_degraded_config_warns(caplog):
    art = run_experiment(tiny(cap_exactness=10))
    assert any("exact to" in r.message for r in caplog.records)
    assert art.eval_rule is not art.cap_rule
    assert art.exactness_defect > 1e-6


def test_seeded_configs():
    cs = seeded_configs(tiny(noise_seed=3, truth_seed=9), 3, vary_truth=True)
    assert [c.noise_seed for c in cs] == [3, 4, 5]
    assert [c.truth_seed for c in cs] == [9, 10, 11]
    assert [c.truth_seed for c in seeded_configs(tiny(truth_seed=9), 2)] == [9, 9]
    assert len(run_many(tiny(), 2)) == 2


def test_report_files(tmp_path):
    art = run_experiment(tiny())
    write_run(art, tmp_path / "a")
    files = {p.name for p in (tmp_path / "a").iterdir()}
    assert {"candidates.csv", "summary.csv", "plot_data.csv", "config.txt", "truth.txt",
            "symbols.csv", "cap_rule.csv", "sphere_rule.csv", "f1.csv", "f2.csv",
            "timings.json"} <= files
    first = lambda name: (tmp_path / "a" / name).read_text().splitlines()[0].split(",")
    assert first("candidates.csv") == CANDIDATE_HEADER
    assert first("summary.csv") == SUMMARY_HEADER
    assert first("plot_data.csv") == PLOT_HEADER
    s = read_summary(tmp_path / "a" / "summary.csv")
    assert s["bound_holds"] is True and s["n_candidates"] == 8
    assert load_config(tmp_path / "a" / "config.txt") == art.config


def test_byte_identical_rerun(tmp_path):
    for name in ("a", "b"):
        write_run(run_experiment(tiny(eps1=0.05)), tmp_path / name)
    for csv in sorted((tmp_path / "a").glob("*.csv")):
        assert csv.read_bytes() == (tmp_path / "b" / csv.name).read_bytes(), csv.name
    assert b"\r" not in (tmp_path / "a" / "summary.csv").read_bytes()


def test_rerun_from_snapshot(tmp_path):
    art = run_experiment(tiny(noise_seed=4))
    write_run(art, tmp_path / "a", save_fields=False)
    again = run_experiment(load_config(tmp_path / "a" / "config.txt"))
    write_run(again, tmp_path / "b", save_fields=False)
    assert (tmp_path / "a" / "candidates.csv").read_bytes() == \
        (tmp_path / "b" / "candidates.csv").read_bytes()


def test_plot_data_aggregation(tmp_path):
    for i, art in enumerate(run_many(tiny(), 3)):
        write_run(art, tmp_path / f"run_{i:03d}", save_fields=False)
    dirs = collect_runs(tmp_path)
    assert [d.name for d in dirs] == ["run_000", "run_001", "run_002"]
    summaries = write_plot_data(dirs, tmp_path / "plot_data.csv")
    lines = (tmp_path / "plot_data.csv").read_text().splitlines()
    assert lines[0] == ",".join(PLOT_HEADER) and len(lines) == 4
    assert len(summaries) == 3
