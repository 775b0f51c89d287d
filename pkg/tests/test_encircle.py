import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from epdyn.encircle import (
    ExchangeReport,
    LoopSpec,
    encircle_once,
    gep_residual,
    lambda_bar,
    revolution_cycle,
    theta_eigvecs,
    trace_lambda_loop,
)
from epdyn.errors import StepTooCoarse, ValidationError
from epdyn.model_one import lambda_roots

CCW_TABLE = [((1, "-"), (-1, "+")), ((-1, "+"), (-1, "-")), ((-1, "-"), (1, "+")), ((1, "+"), (1, "-"))]
CW_TABLE = [((-1, "-"), (1, "+")), ((-1, "+"), (-1, "-")), ((1, "-"), (-1, "+")), ((1, "+"), (1, "-"))]


def test_theta_zero_and_quarter():
    lb = lambda_bar(0.6)
    s = theta_eigvecs(0.6, 0.0)
    assert np.allclose(s.psi_minus, [1, 0]) and np.allclose(s.psi_plus, [0, -1j * lb])
    s = theta_eigvecs(0.6, math.pi / 4)
    assert np.allclose(s.psi_minus, [math.sqrt(2) / 2, 1j * lb * math.sqrt(2) / 2])


@given(st.floats(0.05, 0.95), st.floats(0.05, 1.5).filter(lambda x: abs(x - math.pi / 4) > 1e-3))
def test_theta_state_eigenvalues(g, theta):
    s = theta_eigvecs(g, theta)
    lb = s.lambda_bar
    assert s.lambda_minus / lb == pytest.approx(1j * math.tan(theta), rel=1e-12)
    assert s.lambda_plus * s.lambda_minus * (1 - g * g) == pytest.approx(1.0, rel=1e-12)
    assert s.lambda_plus == pytest.approx(theta_eigvecs(g, theta + math.pi / 2).lambda_minus, rel=1e-9)
    assert gep_residual(g, s) < 1e-10 * max(1, abs(s.eps_d))
    # the matching impurity energy reproduces the same roots
    roots = lambda_roots(g, s.eps_d)
    for lam in (s.lambda_minus, s.lambda_plus):
        assert min(abs(lam - r) for r in roots) < 1e-9 * max(1, abs(lam))


def test_projective_representation_at_quarter_turn():
    s = theta_eigvecs(0.5, math.pi / 2)
    assert abs(s.lambda_minus) > 1e12
    assert gep_residual(0.5, s) < 1e-12 * max(1.0, abs(s.psi_minus).max())


@pytest.mark.parametrize("g", [0.1, 0.6, 0.9])
def test_single_loop_exchange(g):
    lb = lambda_bar(g)
    ccw = encircle_once(g, "ccw")
    assert (ccw.minus_to, ccw.plus_to) == ((-1, "+"), (1, "-"))
    assert np.allclose(theta_eigvecs(g, math.pi / 2).psi_minus, [0, 1j * lb], atol=1e-12)
    cw = encircle_once(g, "cw")
    assert (cw.minus_to, cw.plus_to) == ((1, "+"), (-1, "-"))
    assert np.allclose(theta_eigvecs(g, -math.pi / 2).psi_plus, -theta_eigvecs(g, 0).psi_minus, atol=1e-12)


def test_ccw_then_cw_is_identity():
    g = 0.6
    s0 = theta_eigvecs(g, 0.3)
    back = theta_eigvecs(g, 0.3 + math.pi / 2 - math.pi / 2)
    assert np.allclose(back.psi_minus, s0.psi_minus) and np.allclose(back.psi_plus, s0.psi_plus)


@pytest.mark.parametrize("direction, table", [("ccw", CCW_TABLE), ("cw", CW_TABLE)])
def test_revolution_tables(direction, table):
    assert revolution_cycle(0.6, direction, 4) == table
    assert revolution_cycle(0.6, direction, 8)[4:] == table


@pytest.mark.parametrize("direction", ["ccw", "cw"])
@given(theta0=st.floats(-3, 3))
def test_exchange_square_and_fourth_power(direction, theta0):
    cyc = revolution_cycle(0.4, direction, 4, theta0)
    assert cyc[1] == ((-1, "+"), (-1, "-"))
    assert cyc[3] == ((1, "+"), (1, "-"))


def test_report_text():
    assert encircle_once(0.6, "ccw").describe() == "swap: Ψ₋ → −Ψ₊, Ψ₊ → Ψ₋"
    assert ExchangeReport("ccw", 4, (1, "+"), (1, "-")).describe() == "identity restored"
    assert revolution_cycle(0.6, "ccw", 2)[-1] == ((-1, "+"), (-1, "-"))
    assert ExchangeReport("ccw", 2, (-1, "+"), (-1, "-")).describe().startswith("sign flip")


def test_cycle_validation():
    with pytest.raises(ValidationError):
        revolution_cycle(0.6, "ccw", 0)
    with pytest.raises(ValidationError):
        encircle_once(0.6, "sideways")
    with pytest.raises(ValidationError):
        theta_eigvecs(1.2, 0.0)


# ------------------------------------------------------------ lambda loops

@pytest.mark.parametrize("direction, shift", [("ccw", math.pi / 2), ("cw", -math.pi / 2)])
def test_loop_around_one_ep_swaps(direction, shift):
    tr = trace_lambda_loop(0.6, LoopSpec.around_ep(0.6, 0.5, direction, 256))
    assert tr.enclosed == 1 and tr.swapped
    assert tr.theta_shift == pytest.approx(shift, abs=1e-9)
    assert abs(tr.branch_a[-1] - tr.branch_b[0]) < 1e-12
    assert abs(tr.branch_b[-1] - tr.branch_a[0]) < 1e-12


def test_loop_theta_shift_matches_table():
    tr = trace_lambda_loop(0.6, LoopSpec.around_ep(0.6, 0.5, "ccw"))
    target = theta_eigvecs(0.6, tr.theta_shift)
    ref = theta_eigvecs(0.6, 0.0)
    assert np.allclose(target.psi_minus, -ref.psi_plus, atol=1e-9)


@pytest.mark.parametrize("direction", ["ccw", "cw"])
def test_loop_around_both_eps_returns(direction):
    tr = trace_lambda_loop(0.6, LoopSpec.around_both(0.6, 1.5, direction, 256))
    assert tr.enclosed == 2 and not tr.swapped
    assert abs(tr.theta_shift) < 1e-9
    assert abs(tr.branch_a[-1] - tr.branch_a[0]) < 1e-12


def test_large_loop_centered_on_ep_still_swaps():
    # radius 1.5 lam_bar about +lam_bar stays clear of -lam_bar (distance 2 lam_bar)
    lb = lambda_bar(0.6)
    tr = trace_lambda_loop(0.6, LoopSpec(lb, 1.5 * lb, "ccw", 256))
    assert tr.enclosed == 1 and tr.swapped


@pytest.mark.parametrize("loop", [LoopSpec.around_ep(0.6, 0.5, "ccw", 256), LoopSpec.around_both(0.6, 1.5, "cw", 256)])
def test_swap_detection_stable_under_step_doubling(loop):
    a = trace_lambda_loop(0.6, loop)
    b = trace_lambda_loop(0.6, LoopSpec(loop.center, loop.radius, loop.direction, 2 * loop.steps))
    assert a.swapped == b.swapped
    assert a.theta_shift == pytest.approx(b.theta_shift, abs=1e-9)


def test_tiny_loop_shrinks_to_ep():
    lb = lambda_bar(0.6)
    tr = trace_lambda_loop(0.6, LoopSpec.around_ep(0.6, 1e-8, "ccw", 256))
    dev = np.max(np.abs(np.concatenate([tr.branch_a, tr.branch_b]) - lb))
    assert dev < 1e-3
    assert tr.swapped


def test_loop_spec_validation():
    with pytest.raises(ValidationError):
        LoopSpec.around_ep(0.6, 1.5)
    with pytest.raises(ValidationError):
        LoopSpec(1.0, 0.5, "ccw", 8)
    with pytest.raises(ValidationError):
        LoopSpec(1.0, -0.5, "ccw", 64)
    lb = lambda_bar(0.6)
    with pytest.raises(ValidationError):
        trace_lambda_loop(0.6, LoopSpec(0.0, lb, "ccw", 64))


def test_coarse_steps_detected():
    # a loop hugging one EP with the minimum step count cannot follow the branches
    lb = lambda_bar(0.6)
    with pytest.raises(StepTooCoarse):
        trace_lambda_loop(0.6, LoopSpec(lb + 0.99 * lb, 0.999 * lb, "ccw", 16))
