"""Tests for the convergence sweep harness."""

import math

import numpy as np
import pytest

from ksurf.harness import (
    ConvergenceReport,
    SweepConfig,
    demo_data,
    emit_report,
    fit_slope,
    load_report,
    run_sweep,
    zero_data,
)
from ksurf.sinegordon import SchemeKind


def test_demo_and_zero_data():
    from ksurf.goursat import LatticeDomain2

    dom = LatticeDomain2(1.0, 0.25)
    a0, b0 = demo_data().sample(dom)
    xs = np.arange(4) * 0.25
    assert np.allclose(a0, np.cos(2.0 * xs))
    assert np.allclose(b0, 1.0 + np.sin(xs))
    z0, z1 = zero_data().sample(dom)
    assert not z0.any() and not z1.any()


def test_sweep_config_normalizes_quotients():
    cfg = SweepConfig(quantity="quotients_order_3")
    assert cfg.quantity == "quotients"
    assert cfg.quotient_order == 3
    assert SweepConfig(quantity="quotients").quotient_order == 2  # default


def test_sweep_config_validation():
    with pytest.raises(ValueError, match="quantity"):
        SweepConfig(quantity="victory")
    with pytest.raises(ValueError, match="k_min"):
        SweepConfig(k_min=0)
    with pytest.raises(ValueError, match="k_min"):
        SweepConfig(k_min=7, k_max=6)
    with pytest.raises(ValueError, match="k_ref"):
        SweepConfig(k_min=4, k_max=6, k_ref=7)  # reference too close
    with pytest.raises(ValueError, match="r must"):
        SweepConfig(r=0.0)
    with pytest.raises(ValueError, match="lambda"):
        SweepConfig(lam=-1.0)
    with pytest.raises(ValueError, match="quotient_order"):
        SweepConfig(quantity="quotients_order_0")


def test_fit_slope_exact_power_laws():
    eps = [2.0**-k for k in range(4, 9)]
    rows1 = [(e, 3.0 * e) for e in eps]
    slope, intercept = fit_slope(rows1)
    assert slope == pytest.approx(1.0, abs=1e-12)
    assert intercept == pytest.approx(math.log(3.0), abs=1e-12)
    rows2 = [(e, 0.5 * e * e) for e in eps]
    slope2, _ = fit_slope(rows2)
    assert slope2 == pytest.approx(2.0, abs=1e-12)


def test_fit_slope_validation():
    with pytest.raises(ValueError, match="3 rows"):
        fit_slope([(0.5, 0.1), (0.25, 0.05)])
    with pytest.raises(ValueError, match="positive"):
        fit_slope([(0.5, 0.1), (0.25, 0.0), (0.125, 0.01)])


def test_run_sweep_fields():
    cfg = SweepConfig(k_min=4, k_max=6, k_ref=9)
    rep = run_sweep(cfg, demo_data())
    assert rep.quantity == "fields_ab"
    assert [e for e, _ in rep.rows] == [2.0**-4, 2.0**-5, 2.0**-6]
    errs = [err for _, err in rep.rows]
    assert all(e0 > e1 for e0, e1 in zip(errs, errs[1:]))
    assert 0.8 <= rep.slope <= 1.2  # measured 1.069
    assert not rep.degenerate
    assert sorted(rep.families) == ["a", "b"]
    for idx, (_, err) in enumerate(rep.rows):
        assert err == max(rep.families["a"][idx], rep.families["b"][idx])


def test_run_sweep_phi():
    cfg = SweepConfig(k_min=4, k_max=6, k_ref=9, quantity="phi")
    rep = run_sweep(cfg, demo_data())
    assert 0.8 <= rep.slope <= 1.2  # measured 1.000
    assert sorted(rep.families) == ["phi"]


def test_run_sweep_quotients():
    cfg = SweepConfig(k_min=4, k_max=6, k_ref=9, quantity="quotients_order_1")
    rep = run_sweep(cfg, demo_data())
    assert sorted(rep.families) == [
        "a_dx0dy1",
        "a_dx1dy0",
        "b_dx0dy1",
        "b_dx1dy0",
    ]
    assert 0.8 <= rep.slope <= 1.2  # measured 1.071
    # every family individually decreases monotonically
    for vals in rep.families.values():
        assert all(v0 > v1 for v0, v1 in zip(vals, vals[1:]))


def test_run_sweep_surfaces():
    cfg = SweepConfig(k_min=4, k_max=6, k_ref=9, quantity="surface")
    rep = run_sweep(cfg, demo_data())
    assert 0.8 <= rep.slope <= 1.2  # measured 1.073
    cfg_bt = SweepConfig(
        k_min=4, k_max=6, k_ref=9, quantity="surface_bt", bt_chain=((1.0, 0.5),)
    )
    rep_bt = run_sweep(cfg_bt, demo_data())
    assert 0.8 <= rep_bt.slope <= 1.2  # measured 1.057


def test_run_sweep_surface_rejects_naive():
    cfg = SweepConfig(
        k_min=4, k_max=6, k_ref=9, quantity="surface", scheme=SchemeKind.NAIVE
    )
    with pytest.raises(ValueError, match="Hirota"):
        run_sweep(cfg, demo_data())


def test_run_sweep_degenerate():
    cfg = SweepConfig(k_min=4, k_max=6, k_ref=9)
    rep = run_sweep(cfg, zero_data())
    assert rep.degenerate
    assert math.isnan(rep.slope) and math.isnan(rep.intercept)
    assert all(err <= 1e-13 for _, err in rep.rows)


def test_reference_level_insensitivity():
    # refining the reference by one level moves no error by more than 10%,
    # so k_ref = k_max + 3 is comfortably deep enough (measured <= 7.2%)
    data = demo_data()
    rep_a = run_sweep(SweepConfig(k_min=4, k_max=6, k_ref=9), data)
    rep_b = run_sweep(SweepConfig(k_min=4, k_max=6, k_ref=10), data)
    for (_, ea), (_, eb) in zip(rep_a.rows, rep_b.rows):
        assert abs(ea - eb) / eb <= 0.10


def test_larger_domain_larger_error():
    # same eps, bigger square: errors grow with the domain (the constant in
    # the O(eps) bound depends on r)
    data = demo_data()
    rep1 = run_sweep(SweepConfig(r=1.0, k_min=4, k_max=6, k_ref=8), data)
    rep2 = run_sweep(SweepConfig(r=2.0, k_min=5, k_max=7, k_ref=9), data)
    err1 = dict(rep1.rows)
    err2 = dict(rep2.rows)
    for eps in (2.0**-5, 2.0**-6):
        assert err2[eps] > err1[eps]


def test_emit_load_roundtrip(tmp_path):
    rows = [(0.25, 0.1), (0.125, 0.05), (0.0625, 0.024)]
    slope, intercept = fit_slope(rows)
    rep = ConvergenceReport("fields_ab", rows, slope, intercept, False)
    path = tmp_path / "report.csv"
    emit_report(rep, path)
    back = load_report(path)
    assert back.rows == rows  # 17g round trip
    assert back.slope == slope and back.intercept == intercept
    assert not back.degenerate


def test_emit_load_degenerate(tmp_path):
    rep = ConvergenceReport("fields_ab", [(0.25, 0.0)], math.nan, math.nan, True)
    path = tmp_path / "deg.csv"
    emit_report(rep, path)
    text = path.read_text()
    assert "# degenerate=true" in text
    back = load_report(path)
    assert back.degenerate and math.isnan(back.slope)


def test_emit_load_errors(tmp_path):
    with pytest.raises(ValueError, match="empty"):
        emit_report(ConvergenceReport("x", [], 0.0, 0.0, False), tmp_path / "e.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n")
    with pytest.raises(ValueError, match="header"):
        load_report(bad)
