from __future__ import annotations

import json
import math

import numpy as np
import pytest

from quasifix.algebra import NormKind, diag2, scalar
from quasifix.contraction import (
    ContractionCertificate,
    Regime,
    verify_global,
    verify_orbital_type,
    verify_two_step,
)
from quasifix.maps import linear_quarter, piecewise_quarter
from quasifix.metrics import mat2_split_scaled, scalar_backward_one
from quasifix.solver import (
    BoundMode,
    CertificateInvalid,
    RateNotLessThanOne,
    SolverConfig,
    apriori_bound,
    picard_solve,
    uniqueness_probe,
)

GRID = np.linspace(-3.0, 7.0, 21)
PAIRS = [(x, y) for x in GRID for y in GRID]


@pytest.fixture(scope="module")
def sandwich_cert() -> ContractionCertificate:
    return verify_global(linear_quarter(), mat2_split_scaled(0.25),
                         diag2(0.5, 0.5), PAIRS, "forward", tol=1e-12)


# --- picard iteration -------------------------------------------------------------

def test_quarter_map_reaches_zero_quickly(sandwich_cert):
    cfg = SolverConfig(tol=1e-10)
    report = picard_solve(linear_quarter(), mat2_split_scaled(0.25), 1.0,
                          sandwich_cert, cfg)
    assert report.converged
    assert report.iterations <= 20
    assert abs(report.fixed_point) <= 1e-9
    assert report.residual_forward <= 1e-10
    assert report.residual_backward <= 1e-10
    assert report.fixed_point_certified


def test_fixed_seed_returns_in_one_iteration(sandwich_cert):
    report = picard_solve(linear_quarter(), mat2_split_scaled(0.25), 0.0,
                          sandwich_cert, SolverConfig(tol=1e-10))
    assert report.iterations == 1
    assert report.residual_forward == 0.0
    assert report.residual_backward == 0.0


def test_orbital_run_accepts_through_the_lsc_gate():
    cert = verify_orbital_type(piecewise_quarter(), scalar_backward_one(),
                               scalar(1 / math.sqrt(2)), seed=1.0, orbit_len=30)
    report = picard_solve(piecewise_quarter(), scalar_backward_one(), 1.0,
                          cert, SolverConfig(tol=1e-10))
    assert report.converged
    assert report.lsc_check
    assert report.fixed_point_certified
    # backward residual stays at 1: the metric reports 1 whenever x < y
    assert report.residual_backward == 1.0


def test_invalid_certificate_is_refused():
    bad = verify_global(piecewise_quarter(), scalar_backward_one(),
                        scalar(0.9), [(0.0, 1.0)], "forward")
    assert not bad.valid
    with pytest.raises(CertificateInvalid):
        picard_solve(piecewise_quarter(), scalar_backward_one(), 1.0, bad,
                     SolverConfig())


def test_max_iter_flags_but_returns_the_report(sandwich_cert):
    cfg = SolverConfig(max_iter=3, tol=1e-300)
    report = picard_solve(linear_quarter(), mat2_split_scaled(0.25), 1.0,
                          sandwich_cert, cfg)
    assert report.max_iter_exceeded
    assert not report.converged
    assert len(report.trace.points) == 4


# --- a-priori bounds ---------------------------------------------------------------

def test_bound_plugin_value():
    # head 3/4, rate 1/2, p = 4: (3/4) * (1/16) / (1/2) = 3/32
    b4 = apriori_bound(scalar(0.75), math.sqrt(0.5), 4, BoundMode.SANDWICH)
    assert b4 == pytest.approx(3 / 32, abs=1e-14)


def test_bound_head_and_ratio():
    d1 = scalar(0.75)
    full = apriori_bound(d1, 0.5, 0, BoundMode.SANDWICH)
    assert full == pytest.approx(0.75 / (1 - 0.25), abs=1e-14)
    ratio = apriori_bound(d1, 0.5, 5, BoundMode.SANDWICH) / \
        apriori_bound(d1, 0.5, 4, BoundMode.SANDWICH)
    assert ratio == pytest.approx(0.25, abs=1e-12)


def test_bound_requires_contractive_rate():
    with pytest.raises(RateNotLessThanOne):
        apriori_bound(scalar(1.0), 1.0, 0, BoundMode.SANDWICH)
    with pytest.raises(RateNotLessThanOne):
        apriori_bound(scalar(1.0), 1.0, 0, BoundMode.ONE_SIDED)


def test_envelope_covers_both_argument_orders(sandwich_cert):
    cfg = SolverConfig(tol=1e-10)
    for seed in (-3.0, 0.5, 7.0):
        report = picard_solve(linear_quarter(), mat2_split_scaled(0.25), seed,
                              sandwich_cert, cfg)
        assert report.bound_envelope_ok
        assert report.predicted_bounds_rev is not None
        for obs, bound in zip(report.observed_tail, report.predicted_bounds):
            assert obs <= bound + 1e-10
        for obs, bound in zip(report.observed_tail_rev,
                              report.predicted_bounds_rev):
            assert obs <= bound + 1e-10


def test_one_step_decay_under_the_sandwich(sandwich_cert):
    report = picard_solve(linear_quarter(), mat2_split_scaled(0.25), 7.0,
                          sandwich_cert, SolverConfig(tol=1e-10))
    rate = 0.25  # operator norm of the coefficient, squared
    steps = report.trace.bwd_step_norms
    for prev, cur in zip(steps, steps[1:]):
        assert cur <= rate * prev + 1e-10


def test_one_sided_rate_matches_the_resolvent_coefficient():
    cert = verify_two_step(linear_quarter(), scalar_backward_one(),
                           scalar(1 / 3), seed=1.0, orbit_len=30)
    cfg = SolverConfig(max_iter=30, tol=1e-300,
                       bound_mode=BoundMode.ONE_SIDED)
    report = picard_solve(linear_quarter(), scalar_backward_one(), 1.0,
                          cert, cfg)
    assert report.rate == pytest.approx(0.5, abs=1e-12)
    steps = report.trace.fwd_step_norms
    assert len(steps) == 30
    for prev, cur in zip(steps, steps[1:]):
        assert cur <= 0.5 * prev + 1e-10
    # only the (old, new) order carries a predicted envelope here
    assert report.predicted_bounds_rev is None
    assert report.bound_envelope_ok


# --- uniqueness --------------------------------------------------------------------

def test_uniqueness_probe_spread(sandwich_cert):
    spread = uniqueness_probe(linear_quarter(), mat2_split_scaled(0.25),
                              sandwich_cert, [-3.0, 0.5, 7.0],
                              SolverConfig(tol=1e-10))
    assert spread <= 2e-10


def test_uniqueness_probe_single_seed(sandwich_cert):
    assert uniqueness_probe(linear_quarter(), mat2_split_scaled(0.25),
                            sandwich_cert, [1.0], SolverConfig(tol=1e-10)) == 0.0


def test_uniqueness_probe_refuses_orbital_certificates():
    cert = verify_orbital_type(piecewise_quarter(), scalar_backward_one(),
                               scalar(1 / math.sqrt(2)), seed=1.0)
    with pytest.raises(CertificateInvalid):
        uniqueness_probe(piecewise_quarter(), scalar_backward_one(), cert,
                         [1.0, 2.0])


# --- determinism and export ----------------------------------------------------------

def test_reports_are_deterministic(sandwich_cert):
    cfg = SolverConfig(tol=1e-10)
    first = picard_solve(linear_quarter(), mat2_split_scaled(0.25), 0.5,
                         sandwich_cert, cfg)
    second = picard_solve(linear_quarter(), mat2_split_scaled(0.25), 0.5,
                          sandwich_cert, cfg)
    assert json.dumps(first.to_json_dict(), sort_keys=True) == \
        json.dumps(second.to_json_dict(), sort_keys=True)


def test_trace_csv_columns(tmp_path, sandwich_cert):
    report = picard_solve(linear_quarter(), mat2_split_scaled(0.25), 1.0,
                          sandwich_cert, SolverConfig(tol=1e-10))
    out = tmp_path / "trace.csv"
    report.trace.write_csv(out, report.predicted_bounds)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,x_n,fwd_step_norm,bwd_step_norm,bound_p"
    assert len(lines) == len(report.trace.points) + 1
