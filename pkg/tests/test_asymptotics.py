import math

import numpy as np
import pytest

from hankel_lab.asymptotics import (
    FitSettings,
    Instance,
    SweepConfig,
    WilfSettings,
    fit_affine_log,
    fit_log_law,
    identity_suite,
    run_sweep,
    sweep_or_empty,
)
from hankel_lab.asymptotics.suites import default_instances, growth_quantities, identity_checks
from hankel_lab.asymptotics.sweeps import count_pair, measure_point
from hankel_lab.coefficients import Monomial
from hankel_lab.errors import FitError, InputError
from hankel_lab.geometry import Interval
from hankel_lab.operators import GridPolicy
from hankel_lab.operators.spectral import SpectralData
from hankel_lab.symbols import Bump, Constant, Gaussian, SeparableSymbol

LAM, OM = Interval(0.0, 1.0), Interval(-1.0, 1.0)
ONE = SeparableSymbol.constant(1.0, 1)
PI2 = math.pi**2


def bump_pair():
    return SeparableSymbol(((Gaussian((0.3,), 0.08, 1.0), Bump((0.0,), 1.5, 1.0)),), 1)


# -- fitting ---------------------------------------------------------------------

def test_fit_exact_d1():
    pts = [(a, 3 * math.log(a) + 2) for a in (10, 100, 1000, 10000)]
    fit = fit_log_law(pts, 1)
    assert fit.A == pytest.approx(3, abs=1e-9)
    assert fit["B"] == pytest.approx(2, abs=1e-9)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)


def test_fit_constant_gives_zero_log_coefficient():
    fit = fit_log_law([(a, 5.0) for a in (10, 20, 40, 80, 160)], 1)
    assert abs(fit.A) <= 1e-9


def test_fit_exact_d2():
    pts = [(a, 0.2 * a * math.log(a) + 0.5 * a) for a in (8, 16, 32, 64)]
    assert fit_log_law(pts, 2).A == pytest.approx(0.2, abs=1e-9)


def test_fit_with_leading_term():
    pts = [(a, a / math.pi - 0.1 * math.log(a) + 0.3) for a in (50, 100, 200, 400, 800)]
    fit = fit_log_law(pts, 1, leading=True)
    assert fit["D"] == pytest.approx(1 / math.pi, rel=1e-9)
    assert fit.A == pytest.approx(-0.1, abs=1e-7)
    assert fit.predict(np.array([1000.0]), 1)[0] == pytest.approx(1000 / math.pi - 0.1 * math.log(1000) + 0.3)


@pytest.mark.parametrize("pts", [
    [(10, 1.0), (20, 2.0), (40, 3.0)],
    [(10, 1.0), (10, 2.0), (40, 3.0), (80, 4.0)],
    [(1e6, 1.0), (1e6 * (1 + 1e-13), 2.0), (1e6 * (1 + 2e-13), 3.0), (1e6 * (1 + 3e-13), 4.0)],
])
def test_fit_errors(pts):
    with pytest.raises(FitError):
        fit_log_law(pts, 1)


def test_fit_affine_log():
    s, c, r2 = fit_affine_log([(b, 0.3 * math.log(b) - 1) for b in (1e2, 1e3, 1e4, 1e5)])
    assert (s, c, r2) == pytest.approx((0.3, -1.0, 1.0), abs=1e-12)


# -- sweep configuration --------------------------------------------------------

def test_sweep_config_validation():
    with pytest.raises(InputError):
        SweepConfig("trace_H", LAM, OM, ONE, Monomial(2), (100, 200, 300))
    with pytest.raises(InputError):
        SweepConfig("trace_H", LAM, OM, ONE, Monomial(2), (100, 300, 200, 400))
    with pytest.raises(InputError):
        SweepConfig("volume", LAM, OM, ONE, Monomial(2), (1, 2, 3, 4))


def test_count_pair_from_singular_data():
    s = SpectralData(np.array([0.1, 0.3, 0.45]), "singular", 5)
    assert count_pair(s, 0.25) == (2, 2)
    assert count_pair(s, 0.45) == (0, 0)


# -- small sweeps -----------------------------------------------------------------

def small_trace_H(**kw):
    return SweepConfig("trace_H", LAM, OM, ONE, Monomial(2), (40, 80, 160, 320),
                       GridPolicy(oversample=8.0), fit=FitSettings(tolerance={"A": 0.10}), **kw)


def test_trace_H_small_sweep():
    res = run_sweep(small_trace_H())
    assert res.verdict == "pass"
    assert res.predicted["A"] == pytest.approx(2 / PI2, rel=1e-10)
    assert len(res.records) == 4 and not res.rejected
    assert all(r.gate_margin < 0.005 for r in res.records)
    assert [r.alpha for r in res.records] == sorted(r.alpha for r in res.records)
    assert 0.0 <= res.fit.r2 <= 1.0


def test_gate_rejection_leads_to_empty_result():
    cfg = SweepConfig("trace_H", LAM, OM, ONE, Monomial(2), (40, 80, 160, 320),
                      GridPolicy(oversample=1.0, gate_tol=1e-14))
    with pytest.raises(FitError):
        run_sweep(cfg)
    res = sweep_or_empty(cfg)
    assert res.verdict == "insufficient_data" and not res.records and res.fit is None


def test_count_zero_branch():
    cfg = SweepConfig("count", LAM, OM, ONE, None, (40, 80, 160, 320), GridPolicy(oversample=2.0),
                      threshold=0.5)
    res = run_sweep(cfg)
    assert all(r.measured == 0 for r in res.records)
    assert res.predicted["A"] == 0.0
    assert all(r.extra["n_plus"] == r.extra["n_minus"] for r in res.records)


def test_count_pairs_match_at_interior_threshold():
    cfg = SweepConfig("count", LAM, OM, ONE, None, (40, 80, 160, 320), GridPolicy(oversample=2.0),
                      threshold=0.25)
    rec = measure_point(cfg, 160.0)
    assert rec.extra["n_plus"] == rec.extra["n_minus"] > 0


def test_hs_norm_small_sweep_is_consistent():
    cfg = SweepConfig("hs_norm", LAM, OM, ONE, Monomial(2), (50, 100, 200, 400),
                      GridPolicy(oversample=8.0))
    res = run_sweep(cfg)
    checks = {c.name: c for c in res.checks}
    assert checks["frobenius_vs_trace"].passed
    assert res.predicted["A"] == pytest.approx(1 / PI2, rel=1e-10)


def test_trace_T_linear_has_no_log_term():
    cfg = SweepConfig("trace_T", LAM, OM, ONE, Monomial(1), (50, 100, 200, 400, 800),
                      GridPolicy(oversample=4.0), weight=ONE)
    res = run_sweep(cfg)
    assert res.fit["D"] == pytest.approx(1 / math.pi, rel=0.02)
    assert abs(res.fit.A) <= max(3 * res.fit.stderr["A"], 1e-6)
    assert res.predicted["A"] == 0.0


def test_wilf_small_run():
    cfg = SweepConfig("wilf", alphas=(1e2, 1e3, 1e4, 1e5),
                      wilf=WilfSettings(lambdas=(0.5, 1.0)))
    res = run_sweep(cfg)
    checks = {c.name: c for c in res.checks}
    for name in ("norm_below_pi", "norm_increasing_in_b", "count_nonincreasing_in_lambda",
                 "slope_positive_lambda_0.5"):
        assert checks[name].passed, name
    assert set(res.series) == {0.5, 1.0}
    assert all(r.gate_margin == 0 for recs in res.series.values() for r in recs)


# -- suites ---------------------------------------------------------------------------

def test_identity_suite_unit_symbol():
    rep = identity_suite(tol=1e-10)
    assert rep.passed
    names = {c.name.split(":", 1)[1] for c in rep.checks}
    assert {"UHU_plus_H", "G_squared", "spectrum_symmetry", "parity_t+t2", "parity_t3+t4",
            "GstarG_equals_T_minus_T2", "nonzero_spectra_GstarG_GGstar",
            "H2_block_diagonal"} <= names


def test_identity_suite_zero_symbol():
    zero = SeparableSymbol.constant(0.0, 1)
    inst = [Instance("zero", LAM, OM, 20.0, zero)]
    rep = identity_suite(inst)
    assert rep.passed
    assert all(c.value == 0.0 for c in rep.checks)


def test_identity_suite_smooth_symbol():
    inst = [Instance(f"bump{a:g}", LAM, OM, a, bump_pair()) for a in (20.0, 40.0)]
    rep = identity_suite(inst, tol=1e-9)
    assert rep.passed


def test_identity_checks_detect_broken_structure():
    # with a zero tolerance, rounding-level residues must register as failures
    inst = default_instances()[0]
    checks = identity_checks(inst, GridPolicy(oversample=2.0), tol=0.0)
    assert any(not c.passed for c in checks)


def test_growth_trivial_cases():
    grid = GridPolicy(oversample=1.0).grid(50.0, 1, 1.5, 1.0)
    xi_only = SeparableSymbol(((Constant(1.0, 1), Bump((0.0,), 1.5, 1.0)),), 1)
    q = growth_quantities(grid, xi_only, ONE, LAM, OM)
    assert q["S1_left_minus_right"] == 0.0
    a = bump_pair()
    q = growth_quantities(grid, a, ONE, LAM, OM)
    assert q["S1_product_defect"] <= 1e-10
    assert q["S1_left_minus_right"] > 0
