import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from epdyn.errors import LightConeViolation, ValidationError
from epdyn.model_one import ModelOneParams, ep_location
from epdyn.model_two import ModelTwoParams, ep_locations_m2
from epdyn.survival import (
    Method,
    amplitude_contour,
    amplitude_contour_m1,
    amplitude_contour_m2,
    amplitude_finite_chain,
    chain_hamiltonian,
    delta_ep,
    ep2a_longtime,
    ep2a_near_threshold,
    ep2a_pole,
    ep2b_edge_coefficient,
    ep2b_longtime,
    ep2b_pole,
    survival_series,
    timescales,
    zeno,
)

M1_SETS = [(0.1, -1.989974), (0.5, -1.7321), (0.9, -0.87), (0.6, 1.7), (0.3, 0.4)]
M2_SETS = [(0.1, 0.0050126), (0.75, 0.3385622), (0.4, 1.3), (0.2, 2.5)]


def _params():
    return [ModelOneParams(*a) for a in M1_SETS] + [ModelTwoParams(*a) for a in M2_SETS]


# ------------------------------------------------------------- exact routes

@pytest.mark.parametrize("p", _params(), ids=str)
def test_contour_unitarity(p):
    t = np.concatenate([[0.0], np.geomspace(0.01, 60, 40)])
    s = amplitude_contour(p, t)
    assert s.method is Method.CONTOUR and s.method.exact
    assert abs(s.probability[0] - 1) < 1e-10
    assert abs(s.amplitude[0] - 1) < 1e-10
    assert s.is_unitary and not s.failed.any()
    assert np.allclose(s.probability, np.abs(s.amplitude) ** 2, rtol=0, atol=1e-15)


def test_contour_bound_state_keeps_weight():
    # eps_d = 1.7 > 2 - g^2 at g = 0.6: one bound state, P tends to its weight squared
    p = ModelOneParams(0.6, 1.7)
    s = amplitude_contour(p, [1600.0, 6400.0])
    lam = [x for x in np.roots([0.64, 1.7, 1.0]) if abs(x) < 1][0]
    weight = (1 - lam ** 2) / (1 - 0.64 * lam ** 2)   # residue of G_dd in E at the bound state
    assert s.probability == pytest.approx(weight ** 2, rel=5e-3)
    assert abs(s.probability[1] - weight ** 2) < abs(s.probability[0] - weight ** 2)


@pytest.mark.parametrize("p", [ModelOneParams(0.5, -1.7321), ModelTwoParams(0.75, 0.3385622)], ids=str)
def test_contour_matches_finite_chain(p):
    t = np.linspace(0, 500, 61)
    a = amplitude_contour(p, t).amplitude
    b = amplitude_finite_chain(p, 2000, t).amplitude
    assert np.max(np.abs(a - b)) < 1e-6


def test_wrapper_type_checks():
    with pytest.raises(ValidationError):
        amplitude_contour_m1(ModelTwoParams(0.1, 1.0), [1.0])
    with pytest.raises(ValidationError):
        amplitude_contour_m2(ModelOneParams(0.1, 1.0), [1.0])


@pytest.mark.parametrize("bad", [[-1.0], [2.0, 1.0], [np.nan]])
def test_time_grid_validation(bad):
    with pytest.raises(ValidationError):
        amplitude_contour(ModelOneParams(0.3, 0.1), bad)


def test_budget_failure_is_per_point():
    s = amplitude_contour(ModelOneParams(0.3, 0.1), [0.5, 400.0], max_evals=5000)
    assert not s.failed[0] and s.failed[1]
    assert np.isnan(s.amplitude[1])


@pytest.mark.parametrize("p", [ModelOneParams(0.0, 1.0), ModelOneParams(0.0, -0.4)], ids=str)
def test_decoupled_impurity_stays(p):
    t = np.linspace(0, 50, 11)
    assert np.allclose(amplitude_contour(p, t).probability, 1.0, atol=1e-14)
    assert np.allclose(amplitude_finite_chain(p, 200, t).probability, 1.0, atol=1e-14)


@pytest.mark.parametrize("p", [ModelOneParams(0.4, -0.3), ModelTwoParams(0.6, 0.8)], ids=str)
def test_tiny_chain_matches_matrix_exponential(p):
    d, e = chain_hamiltonian(p, 4)
    H = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    t = np.array([0.0, 0.3, 1.7, 5.0, 12.5])
    ref = np.array([expm(-1j * H * x)[0, 0] for x in t])
    got = amplitude_finite_chain(p, 4, t, check_light_cone=False).amplitude
    assert np.max(np.abs(got - ref)) < 1e-13


def test_light_cone_enforced():
    with pytest.raises(LightConeViolation):
        amplitude_finite_chain(ModelOneParams(0.5, 0.0), 100, [0.0, 50.0])
    amplitude_finite_chain(ModelOneParams(0.5, 0.0), 110, [0.0, 50.0])


def test_chain_hamiltonian_layout():
    d, e = chain_hamiltonian(ModelTwoParams(0.3, 0.7), 6)
    assert d.tolist() == [0.0] * 6
    assert e.tolist() == [-0.7, -0.3, -1.0, -1.0, -1.0]
    d, e = chain_hamiltonian(ModelOneParams(0.3, 0.7), 5)
    assert d[0] == 0.7 and e[0] == -0.3


# --------------------------------------------------------------------- Zeno

@pytest.mark.parametrize("p", _params(), ids=str)
def test_zeno_universality(p):
    tz = timescales(p).t_zeno if not (isinstance(p, ModelOneParams) and p.eps_d == 0) else 1.0
    t = 0.01 * tz
    P = amplitude_contour(p, [t]).probability[0]
    coupling = p.g if isinstance(p, ModelOneParams) else p.V
    assert (1 - P) / t ** 2 == pytest.approx(coupling ** 2, rel=0.01)


def test_zeno_values():
    assert zeno(ModelOneParams(0.9, -0.87), 0.0) == 1.0
    assert zeno(ModelOneParams(0.9, -0.87), 0.5) == pytest.approx(0.7975)
    p = ModelTwoParams(0.1, 0.0050126)
    assert zeno(p, 10.0) == pytest.approx(1 - 0.0050126 ** 2 * 100, abs=1e-15)
    # t = 10 is T_Z / 14: the parabola carries an O((g^2 + V^2) t^2) relative correction
    P = amplitude_contour(p, [10.0]).probability[0]
    assert (1 - P) == pytest.approx(1 - zeno(p, 10.0), rel=0.05)
    assert abs(P - zeno(p, 10.0)) < 1e-4


def test_zeno_enhanced_regime_g09():
    p = ModelOneParams(0.9, -0.87)
    P = amplitude_contour(p, [0.5]).probability[0]
    assert abs(P - zeno(p, 0.5)) / P < 0.05


# --------------------------------------------------------------- EP2A pole

def test_ep2a_pole_non_unitary_everywhere():
    for g in np.linspace(0.01, 0.99, 99):
        lb = ep_location(g).lambda_bar
        p0 = abs(ep2a_pole(g, 0.0)) ** 2
        assert p0 == pytest.approx(((1 + lb ** 2) / 2) ** 2, rel=1e-14)
        assert p0 > 1


def test_ep2a_pole_grows():
    P = np.abs(ep2a_pole(0.1, [0.0, 100.0, 1000.0])) ** 2
    assert P[1] > 1 and np.all(np.diff(P) > 0)


def test_small_g_variant_is_order_g4():
    diffs = []
    for g in (0.05, 0.1, 0.2):
        ex, sm = ep2a_pole(g, 3.0), ep2a_pole(g, 3.0, "small_g")
        diffs.append(abs(ex - sm) / abs(ex))
    assert diffs[1] / diffs[0] == pytest.approx(16, rel=0.1)
    assert diffs[2] / diffs[1] == pytest.approx(16, rel=0.1)
    with pytest.raises(ValidationError):
        ep2a_pole(0.1, 1.0, "other")


# ---------------------------------------------------------- near threshold

def test_near_threshold_basics():
    assert ep2a_near_threshold(0.1, 0.0)[1] == 1.0
    assert abs(ep2a_near_threshold(0.1, 0.0)[0]) == pytest.approx(1.0)
    assert delta_ep(0.1) == pytest.approx(2.53e-5, rel=1e-2)


def test_near_threshold_law_g01_t1000():
    p = ModelOneParams(0.1, -1.989974)
    exact = amplitude_contour(p, [1e3]).probability[0]
    assert abs(ep2a_near_threshold(0.1, 1e3)[1] - exact) / exact < 0.03


def test_near_threshold_fails_far_from_edge():
    exact = amplitude_contour(ModelOneParams(0.9, -0.87), [1.0]).probability[0]
    assert abs(ep2a_near_threshold(0.9, 1.0)[1] - exact) > 0.5


# ---------------------------------------------------------------- long time

def test_longtime_cubic_law():
    assert ep2a_longtime(0.5, 2e3) / ep2a_longtime(0.5, 4e3) == pytest.approx(8.0, rel=1e-14)
    assert ep2a_longtime(0.5, 1e3) == pytest.approx(
        0.0625 / (4 * math.pi * (1 - math.sqrt(0.75)) ** 8 * 1e9), rel=1e-14)
    assert 4e-5 < ep2a_longtime(0.5, 1e3) < 6e-5


def test_longtime_g05_against_exact():
    exact = amplitude_contour(ModelOneParams(0.5, -1.7321), [1e3]).probability[0]
    assert ep2a_longtime(0.5, 1e3) / exact == pytest.approx(1.0, abs=0.25)


# -------------------------------------------------------------- EP2B pole

def test_ep2b_pole_identity():
    g = 0.75
    c = math.sqrt(1 - g * g)
    gamma = ep_locations_m2(g).ep2b.gamma_bar
    t = np.linspace(0, 40, 81)
    a, prob = ep2b_pole(g, t)
    assert np.isrealobj(a) or np.all(np.imag(a) == 0)
    assert a[0] == 1 and prob[0] == 1
    assert np.max(np.abs(prob - a ** 2)) < 1e-12
    slope = g * g * (1 + c) / (4 * c ** 1.5)
    assert np.max(np.abs(prob * np.exp(gamma * t) - (1 + slope * t) ** 2)) < 1e-12


def test_ep2b_pole_matches_exact_g01():
    p = ModelTwoParams(0.1, 0.0050126)
    t = np.array([50.0, 200.0, 400.0])
    exact = amplitude_contour(p, t).probability
    assert np.max(np.abs(exact - ep2b_pole(0.1, t)[1])) < 1e-3


def test_ep2b_pole_close_at_g075():
    p = ModelTwoParams(0.75, 0.3385622)
    exact = amplitude_contour(p, [5.0]).probability[0]
    assert ep2b_pole(0.75, 5.0)[1] == pytest.approx(exact, abs=0.02)


# --------------------------------------------------------- EP2B long time

@pytest.mark.parametrize("kind", ["band_edge", "printed"])
def test_edge_coefficient_scales_as_g6(kind):
    ratio = ep2b_edge_coefficient(0.1, kind) / ep2b_edge_coefficient(0.2, kind)
    assert ratio == pytest.approx(2 ** -6, rel=0.1)


def test_edge_coefficient_validation():
    with pytest.raises(ValidationError):
        ep2b_edge_coefficient(0.5, "guess")


def test_ep2b_longtime_g075_t100():
    vb = ep_locations_m2(0.75).ep2b.V_bar
    t = np.linspace(99.0, 101.0, 201)
    exact = amplitude_contour(ModelTwoParams(0.75, vb), t).amplitude
    law = ep2b_longtime(0.75, t)
    envelope = abs(ep2b_edge_coefficient(0.75)) * t ** -1.5
    assert np.max(np.abs(exact - law)) < 0.1 * envelope.max()


# ---------------------------------------------------------------- timescales

def test_timescales_values():
    assert timescales(ModelOneParams(0.1, ep_location(0.1).eps_bar)).t_ep == pytest.approx(3.95e4, rel=0.01)
    assert timescales(ModelOneParams(0.5, -1.7321)).t_ep == pytest.approx(48.25, rel=0.01)
    assert timescales(ModelOneParams(0.9, -0.87)).t_zeno == pytest.approx(1.15, abs=0.005)
    ts = timescales(ModelTwoParams(0.1, 0.0050126))
    assert ts.t_zeno == pytest.approx(1 / (math.sqrt(2) * 0.0050126))
    assert ts.t_ep_edges[0] == pytest.approx(0.5, rel=1e-4) and ts.t_ep_edges[1] == pytest.approx(0.5, rel=1e-4)
    assert ts.gamma_bar == pytest.approx(0.01005, rel=1e-3)


@settings(max_examples=40)
@given(st.floats(0.01, 0.99), st.floats(0.01, 3.0))
def test_timescales_positive(g, x):
    for p in (ModelOneParams(g, -x), ModelTwoParams(g, x)):
        ts = timescales(p)
        assert ts.t_zeno > 0 and ts.t_ep > 0


def test_timescales_undefined_cases():
    with pytest.raises(ValidationError):
        timescales(ModelOneParams(0.3, 0.0))


# ---------------------------------------------------------------- dispatch

def test_survival_series_dispatch():
    p1, p2 = ModelOneParams(0.5, -1.7321), ModelTwoParams(0.75, 0.3385622)
    t = np.linspace(0, 5, 6)
    for m in ("zeno", "ep2a_pole", "near_threshold", "longtime"):
        s = survival_series(p1, t, m)
        assert s.method.value == m and not s.method.exact
    for m in ("ep2b_pole", "ep2b_longtime"):
        assert survival_series(p2, t[1:], m).method.value == m
    with pytest.raises(ValidationError):
        survival_series(p2, t, "near_threshold")
    with pytest.raises(ValidationError):
        survival_series(p1, t, "ep2b_pole")
    with pytest.raises(ValueError):
        survival_series(p1, t, "magic")
    s = survival_series(p1, t, "finite_chain")
    assert s.method is Method.FINITE_CHAIN and s.params["model"] == "I"
    assert np.isnan(survival_series(p1, t, "zeno").amplitude).all()
