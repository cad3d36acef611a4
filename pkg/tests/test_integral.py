from __future__ import annotations

import math

import numpy as np
import pytest

from quasifix.algebra import NormKind, norm
from quasifix.integral import (
    GridMismatch,
    IntegralProblem,
    NotContractive,
    QuadratureKind,
    REGIME_CONTRACTIVE,
    REGIME_NOT_CONTRACTIVE,
    apply_T,
    closed_form_constant_integral,
    closed_form_identity_integral,
    contraction_rate,
    growth_value,
    make_problem,
    mult_op_distance,
    quadrature,
    regime_report,
    run_demo,
    uniform_grid,
)
from quasifix.solver import SolverConfig


# --- quadrature ---------------------------------------------------------------

@pytest.mark.parametrize("k", [0.1, 0.5, 1.0, 4.0, 10.0])
def test_trapezoid_matches_closed_forms(k):
    prob = make_problem(0.5, k, n=10_000)
    g = prob.grid_array
    err_id = abs(quadrature(g / (g * g + k), prob)
                 - closed_form_identity_integral(k))
    err_const = abs(quadrature(1.0 / (g * g + k), prob)
                    - closed_form_constant_integral(k))
    assert err_id <= 1e-6
    assert err_const <= 1e-6


def test_quadrature_error_shrinks_with_refinement():
    k = 4.0
    errors = []
    for n in (512, 2048, 8192):
        prob = make_problem(0.5, k, n=n)
        report = regime_report(prob)
        errors.append(max(report.quadrature_errors.values()))
    assert errors[0] > errors[1] > errors[2]


def test_midpoint_log_weights_integrate_dt_over_t():
    # integral of t dt/t over [1/n, 1] is 1 - 1/n; the rule is sharp on
    # geometric grids and still serviceable on uniform ones
    geo = np.geomspace(1 / 4096, 1.0, 4096)
    prob = IntegralProblem(0.5, 4.0, tuple(geo), QuadratureKind.MIDPOINT_LOG)
    assert quadrature(geo, prob) == pytest.approx(1.0 - geo[0], abs=1e-6)
    uni = uniform_grid(4096)
    prob_uni = IntegralProblem(0.5, 4.0, tuple(uni), QuadratureKind.MIDPOINT_LOG)
    assert quadrature(uni, prob_uni) == pytest.approx(1.0 - uni[0], abs=1e-4)


# --- operator -------------------------------------------------------------------

def test_zero_function_is_fixed():
    prob = make_problem(0.5, 4.0, n=512)
    assert np.all(apply_T(np.zeros(512), prob) == 0.0)


def test_identity_seed_matches_closed_form():
    alpha, k = 0.5, 4.0
    prob = make_problem(alpha, k, n=10_000)
    g = prob.grid_array
    expected = 0.5 * alpha * math.log(1.0 + 1.0 / k) * g
    assert np.max(np.abs(apply_T(g, prob) - expected)) <= 1e-6


def test_constant_seed_matches_closed_form():
    alpha, k = 0.5, 4.0
    prob = make_problem(alpha, k, n=10_000)
    g = prob.grid_array
    expected = alpha * closed_form_constant_integral(k) * g
    assert np.max(np.abs(apply_T(np.ones(g.size), prob) - expected)) <= 1e-6


def test_operator_is_linear():
    prob = make_problem(0.7, 2.0, n=256)
    g = prob.grid_array
    f1, f2 = np.sin(3 * g), g ** 2
    lhs = apply_T(2.0 * f1 + 3.0 * f2, prob)
    rhs = 2.0 * apply_T(f1, prob) + 3.0 * apply_T(f2, prob)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_operator_output_is_a_multiple_of_the_grid():
    prob = make_problem(0.7, 2.0, n=256)
    g = prob.grid_array
    out = apply_T(np.cos(g), prob)
    ratio = out / g
    assert np.max(np.abs(ratio - ratio[0])) <= 1e-12 * max(1.0, abs(ratio[0]))


def test_grid_mismatch_is_rejected():
    prob = make_problem(0.5, 4.0, n=64)
    with pytest.raises(GridMismatch):
        apply_T(np.ones(32), prob)
    with pytest.raises(GridMismatch):
        mult_op_distance(np.ones(32), np.ones(64), prob)


# --- metric --------------------------------------------------------------------

def test_distance_asymmetry_factor_on_dominated_pairs():
    prob = make_problem(0.5, 4.0, n=128)
    g = prob.grid_array
    f_hi = g + 1.0
    d_hi_lo = mult_op_distance(f_hi, g, prob)
    d_lo_hi = mult_op_distance(g, f_hi, prob)
    n_hi = norm(d_hi_lo, NormKind.OPERATOR)
    n_lo = norm(d_lo_hi, NormKind.OPERATOR)
    assert abs(n_hi - 0.5 * n_lo) <= 1e-12
    # everything sits on the f > g branch
    assert np.all(d_hi_lo.data == 0.5 * (f_hi - g))


# --- regimes --------------------------------------------------------------------

def test_reference_parameters_are_contractive_without_growth():
    report = regime_report(make_problem(0.5, 4.0, n=512))
    assert report.regime == REGIME_CONTRACTIVE
    assert report.rate == pytest.approx(0.5 * math.atan(0.5) / 2.0, abs=1e-12)
    assert report.rate == pytest.approx(0.1159, abs=1e-4)
    assert report.growth == pytest.approx(0.25 * math.log(1.25), abs=1e-12)
    assert not report.tf0_exceeds_f0
    assert not report.iterates_increasing
    assert report.rate < report.rate_coarse_bound


def test_tiny_alpha_is_trivially_contractive():
    report = regime_report(make_problem(1e-6, 1.0, n=128))
    assert report.regime == REGIME_CONTRACTIVE
    assert report.rate < 1e-5


def test_growth_demand_conflicts_with_contraction():
    report = regime_report(make_problem(2.0, 0.3, n=512))
    assert report.growth > 1.0
    assert report.rate > 1.0
    assert report.regime == REGIME_NOT_CONTRACTIVE
    assert report.tf0_exceeds_f0
    assert report.iterates_increasing


# --- demo ------------------------------------------------------------------------

def test_demo_converges_to_the_zero_function():
    # the operator is rank one with range along the grid; a fixed point
    # c * grid needs c = c * growth, so only c = 0 works when growth != 1
    prob = make_problem(0.5, 4.0, n=2048)
    report = run_demo(prob, SolverConfig(tol=1e-8, max_iter=100))
    assert report.solver["converged"]
    assert report.solver["fixed_point_sup"] <= 1e-7
    assert report.equation_residual <= 1e-8
    assert report.solver["bound_envelope_ok"]


def test_demo_zero_seed_is_immediate():
    prob = make_problem(0.5, 4.0, n=256, f0=np.zeros(256))
    report = run_demo(prob, SolverConfig(tol=1e-8, max_iter=10))
    assert report.solver["iterations"] == 1
    assert report.equation_residual == 0.0


def test_demo_refuses_non_contractive_parameters():
    with pytest.raises(NotContractive):
        run_demo(make_problem(2.0, 0.3, n=128))


def test_problem_validation():
    with pytest.raises(ValueError):
        make_problem(-1.0, 1.0)
    with pytest.raises(ValueError):
        IntegralProblem(0.5, 4.0, (0.0, 0.5, 1.0))
    with pytest.raises(ValueError):
        IntegralProblem(0.5, 4.0, (0.5, 0.25, 1.0))
