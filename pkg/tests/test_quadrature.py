import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capselect.errors import RuleMismatchError
from capselect.field import DiscreteField, sample
from capselect.quadrature import (
    CapGeometry, cap_rule, check_exactness, discrete_inner, format_number, full_sphere_rule,
    harmonic_gram, required_bandwidth,
)

from conftest import R_GROUND, R_SAT, brute_cap_gram, random_coeffs


# ---- geometry ---------------------------------------------------------------

def test_cap_geometry():
    cap = CapGeometry(R_GROUND, 0.3)
    assert cap.t_min == pytest.approx(0.7)
    assert cap.area == 2 * np.pi * R_GROUND ** 2 * 0.3
    for bad in (0.0, -0.1, 2.5):
        with pytest.raises(ValueError):
            CapGeometry(R_GROUND, bad)


# ---- construction -----------------------------------------------------------

@pytest.mark.parametrize("style", ["equiangular", "gauss_legendre"])
def test_sphere_rule_b1_constants(style):
    rule = full_sphere_rule(1, R_SAT, style)
    assert rule.weights.sum() == pytest.approx(4 * np.pi * R_SAT ** 2, rel=1e-12)
    assert rule.exactness_degree == 1


def test_cap_rule_d0():
    cap = CapGeometry(R_GROUND, 1.0)
    rule = cap_rule(cap, 0)
    assert rule.n_rings == 1 and rule.size == 1
    assert rule.weights.sum() == pytest.approx(cap.area, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(rho=st.floats(0.05, 1.95), d=st.integers(0, 60), radius=st.floats(0.5, 1e4))
def test_weights_positive_and_sum_to_area(rho, d, radius):
    cap = CapGeometry(radius, rho)
    rule = cap_rule(cap, d)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(cap.area, rel=1e-9)
    assert rule.size == (d // 2 + 1) * (d + 1)
    assert np.all(np.diff(rule.t_rings) < 0)
    assert np.all(rule.t_rings >= cap.t_min)


@settings(max_examples=20, deadline=None)
@given(B=st.integers(1, 40), style=st.sampled_from(["equiangular", "gauss_legendre"]))
def test_sphere_weights(B, style):
    rule = full_sphere_rule(B, 3.0, style)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(4 * np.pi * 9.0, rel=1e-9)


def test_node_ordering():
    rule = cap_rule(CapGeometry(1.0, 1.0), 4)
    th = rule.theta.reshape(rule.n_rings, rule.n_lon)
    ph = rule.phi.reshape(rule.n_rings, rule.n_lon)
    assert np.all(th[:, 1:] == th[:, :1])
    assert np.all(np.diff(th[:, 0]) > 0)
    np.testing.assert_allclose(ph[0], 2 * np.pi * np.arange(5) / 5)


def test_cap_monomial_integrals():
    # integral of t**k over the cap is 2 pi r^2 (1 - tmin^(k+1)) / (k+1)
    cap = CapGeometry(2.0, 0.7)
    rule = cap_rule(cap, 15)
    t = np.cos(rule.theta)
    for k in range(16):
        exact = 2 * np.pi * 4.0 * (1 - cap.t_min ** (k + 1)) / (k + 1)
        assert np.dot(rule.weights, t ** k) == pytest.approx(exact, rel=1e-12)


# ---- exactness --------------------------------------------------------------

def test_sphere_b31_gram_identity():
    rule = full_sphere_rule(31, R_SAT)
    G = harmonic_gram(rule, 30)
    assert np.max(np.abs(G - np.eye(G.shape[0]))) <= 1e-10
    assert check_exactness(rule, 30) <= 1e-10


def test_styles_agree_on_degree_40_polynomial(rng):
    c = random_coeffs(rng, 20, 5.0)
    vals = []
    for style in ("equiangular", "gauss_legendre"):
        rule = full_sphere_rule(21, 5.0, style)
        f = sample(c, rule)
        vals.append(np.dot(rule.weights, f.values ** 2))
    assert vals[0] == pytest.approx(vals[1], rel=1e-9)


def test_cap_gram_vs_brute_force_oracle():
    cap = CapGeometry(1.0, 0.6)
    rule = cap_rule(cap, 16)
    G = harmonic_gram(rule, 8)
    np.testing.assert_allclose(G, brute_cap_gram(cap, 8), atol=1e-12)


def test_check_exactness_certified_and_degraded():
    cap = CapGeometry(R_GROUND, 1.0)
    assert check_exactness(cap_rule(cap, 20), 10) <= 1e-12
    degraded = check_exactness(cap_rule(cap, 14), 10)
    assert degraded > 1e-3


def test_defect_vanishes_from_threshold_on():
    # below 2L the defect oscillates with d; from 2L on it stays at rounding level
    cap = CapGeometry(R_GROUND, 1.0)
    L = 8
    below = [check_exactness(cap_rule(cap, d), L) for d in range(8, 2 * L)]
    above = [check_exactness(cap_rule(cap, d), L) for d in range(2 * L, 2 * L + 8)]
    assert max(above) <= 1e-12
    assert min(below) > 1e-6


@settings(max_examples=15, deadline=None)
@given(L=st.integers(1, 10), rho=st.floats(0.1, 1.9), seed=st.integers(0, 2 ** 31))
def test_random_polynomials_inner_exact(L, rho, seed):
    rng = np.random.default_rng(seed)
    cap = CapGeometry(R_GROUND, rho)
    g, h = random_coeffs(rng, L), random_coeffs(rng, L)
    rule = cap_rule(cap, 2 * L)
    ref = cap_rule(cap, 4 * L + 7)
    got = discrete_inner(rule, sample(g, rule), sample(h, rule))
    want = discrete_inner(ref, sample(g, ref), sample(h, ref))
    scale = np.linalg.norm(g.coeffs) * np.linalg.norm(h.coeffs)
    assert abs(got - want) <= 1e-9 * scale


def test_discrete_inner_basics():
    cap = CapGeometry(R_GROUND, 1.0)
    rule = cap_rule(cap, 10)
    one = DiscreteField(rule, np.ones(rule.size))
    assert discrete_inner(rule, one, one) == pytest.approx(cap.area, rel=1e-12)
    other = cap_rule(cap, 11)
    with pytest.raises(RuleMismatchError):
        discrete_inner(other, one, one)
    with pytest.raises(RuleMismatchError):
        discrete_inner(rule, np.ones(3), np.ones(3))


def test_required_bandwidth():
    for d in range(0, 50):
        B = required_bandwidth(d)
        assert 2 * B - 1 >= d
        assert B == 1 or 2 * (B - 1) - 1 < d


def test_rule_csv(tmp_path):
    rule = cap_rule(CapGeometry(1.0, 0.5), 3)
    path = tmp_path / "rule.csv"
    rule.to_csv(path)
    text = path.read_bytes().decode("utf-8")
    lines = text.split("\n")
    assert lines[0] == "theta,phi,weight"
    assert len(lines) == rule.size + 2 and lines[-1] == ""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 2], rule.weights)
    np.testing.assert_array_equal(data[:, 0], rule.theta)


def test_format_number():
    assert format_number(True) == "true"
    assert format_number(np.int64(7)) == "7"
    assert format_number(0.1) == "0.10000000000000001"
    assert float(format_number(np.pi)) == np.pi
