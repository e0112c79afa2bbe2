"""Acceptance criteria 1-10, each printing one PASS/FAIL line."""
import time

import numpy as np
import pytest

from plasmavac import boundary, geometry
from plasmavac.cli import main
from plasmavac.errors import InvertibilityError, StabilityError
from plasmavac.geometry import FrontDerivs
from plasmavac.solver.basic_state import build_basic_state
from plasmavac.solver.config import SolverConfig
from plasmavac.solver.experiments import constraint_study, energy_check, gamma_sweep
from plasmavac.solver.ibvp import Discretization, run
from plasmavac.solver.mms import mms_convergence
from plasmavac.suites import run_suite

SAMPLES = 1000


def _suite(name):
    t0 = time.perf_counter()
    rep = run_suite(name, samples=SAMPLES, seed=2024)
    dt = time.perf_counter() - t0
    worst = {c["name"].split(".", 1)[1]: c["value"] for c in rep["checks"]}
    return rep, dt, worst


def _fmt(worst):
    return ", ".join(f"{k}={v:.2e}" if isinstance(v, float) else f"{k}={v}" for k, v in worst.items())


def test_criterion_01_determinants(criterion):
    rep, dt, worst = _suite("determinants")
    ok = rep["ok"] and dt < 5.0
    assert criterion(1, ok, f"{SAMPLES} samples in {dt:.2f}s (< 5s); rel errors {_fmt(worst)} (tol 1e-10)")


def test_criterion_02_spectra(criterion):
    rep, dt, worst = _suite("spectra")
    ws = boundary.ws_system_characteristics()
    ok = (rep["ok"] and dt < 5.0 and tuple(ws["B1_signature"]) == (2, 2, 2)
          and tuple(ws["minus_E12_signature"]) == (1, 6, 1))
    assert criterion(2, ok, f"{SAMPLES} samples in {dt:.2f}s; closed vs numeric {worst['btilde1_closed_vs_numeric']:.2e} "
                            f"(tol 1e-10); B1 {ws['B1_signature']}, -E12 {ws['minus_E12_signature']}; counts 2/4 exact")


def test_criterion_03_symmetrizer(criterion):
    rep, dt, worst = _suite("symmetrizer")
    ok = rep["ok"] and dt < 2.0
    assert criterion(3, ok, f"{SAMPLES} samples in {dt:.2f}s (< 2s); {_fmt(worst)}")


def test_criterion_04_b0(criterion):
    rep, dt, worst = _suite("b0")
    ok = rep["ok"] and dt < 5.0
    assert criterion(4, ok, f"{SAMPLES} samples in {dt:.2f}s; symmetry {worst['B0_symmetric']:.2e} (1e-12), "
                            f"char poly {worst['char_poly_is_cubic_squared']:.2e} (1e-9), Descartes and positivity hold")


def test_criterion_05_boundary_forms(criterion):
    m, dt1, wm = _suite("m-family")
    b, dt2, wb = _suite("boundary-form")
    ok = m["ok"] and b["ok"] and dt1 + dt2 < 10.0
    assert criterion(5, ok, f"{SAMPLES} traces in {dt1 + dt2:.2f}s; MWW {wm['MWW_closed_vs_direct']:.2e}, "
                            f"A decomposition {wb['A_direct_vs_decomposed']:.2e} (tol 1e-9 relative)")


def test_criterion_06_lifting(criterion):
    rep, dt, worst = _suite("lift")
    ok = rep["ok"] and dt < 10.0
    assert criterion(6, ok, f"battery in {dt:.2f}s; trace err {worst['trace_equals_front']:.1e} (1e-12), "
                            f"max sup|Psi_1| {worst['slope_bound_half']:.3f} (<= 0.5), "
                            f"max sup|Psi|/bound {worst['sup_bound_inverse_sqrt_2pi']:.3f} (<= 1)")


def test_criterion_07_transform_orders(criterion):
    t0 = time.perf_counter()
    res = geometry.transform_convergence(ns=(64, 128, 256))
    dt = time.perf_counter() - t0
    o = res["orders"]
    ok = o["maxwell"] >= 1.9 and o["tilde"] >= 1.9 and o["secsym"] >= 1.9 and dt < 120
    assert criterion(7, ok, f"orders transform {o['maxwell']:.3f}, straightened {o['tilde']:.3f}, "
                            f"secondary {o['secsym']:.3f} (>= 1.9) in {dt:.1f}s")


def test_criterion_08_solver(criterion):
    t0 = time.perf_counter()
    basic = build_basic_state()
    assert basic.mu == 0.0 and basic.gates_ok()
    disc = Discretization(basic, 32, 16)
    final = run(disc, 1.0, 0.5)
    zero = not (np.any(final.U) or np.any(final.W) or np.any(final.phi))
    energy = energy_check(basic, 128, 64, 2.0)
    cons = constraint_study(basic, n1=64, coarse_steps=100)
    mms = mms_convergence(basic, ns=(32, 64, 128))
    dt = time.perf_counter() - t0
    ok = (
        zero
        and energy["pass"]
        and 3.5 <= cons["ratio_interior"] <= 4.5
        and min(mms["orders"].values()) >= 1.9
        and dt < 300
    )
    assert criterion(8, ok, f"zero exact {zero}; energy max rel step {energy['max_rel_increase']:.2e} (<= 1e-10); "
                            f"constraint two-grid ratio {cons['ratio_interior']:.3f} in [3.5,4.5]; "
                            f"MMS orders {', '.join(f'{k} {v:.3f}' for k, v in mms['orders'].items())} (>= 1.9); "
                            f"{dt:.0f}s")


def test_criterion_09_gamma_sweep(criterion):
    t0 = time.perf_counter()
    cfg = SolverConfig()
    res = gamma_sweep(cfg)
    dt = time.perf_counter() - t0
    tr = res["trend"]
    basic = res["runs"][0].basic
    gated = abs(basic.mu) <= cfg.mu_star and basic.margin >= cfg.delta
    R = [round(r["ratio"], 4) for r in res["rows"]]
    ok = gated and tr["max_over_min"] <= 10 and not tr["monotone_growth_tail"] and dt < 900
    assert criterion(9, ok, f"R = {R} over gamma {cfg.gamma_list}; max/min {tr['max_over_min']:.2f} (<= 10); "
                            f"tail growth {tr['monotone_growth_tail']}; empirical gamma0 {tr['empirical_gamma0']}; "
                            f"{dt:.0f}s")


def test_criterion_10_negative_controls(criterion, tmp_path, capsys):
    msgs = []
    basic = build_basic_state(H=(0, 0, 1), calH=(0, 0, 2))
    with pytest.raises(StabilityError) as e1:
        basic.require_gates()
    msgs.append("|H x calH| >= delta" in str(e1.value))
    with pytest.raises(InvertibilityError) as e2:
        boundary.btilde1_spectrum(2.5, 0.0, 0.0, 0.5)
    msgs.append("epsilon*|Psi_t| < 1" in str(e2.value))
    with pytest.raises(InvertibilityError):
        geometry.jacobians_at(FrontDerivs(2.0, 0.0, 0.0, 0.0), 0.5)
    cfg = tmp_path / "par.yaml"
    cfg.write_text("H_hat: [0, 0, 1]\ncalH_hat: [0, 0, 2]\n")
    code_gate = main(["gamma-sweep", "--config", str(cfg), "--out", str(tmp_path / "g")])
    msgs.append("non-parallel magnetic fields" in capsys.readouterr().err)
    code_eig = main(["eigen", "2.5", "0", "0", "0.5", "--out", str(tmp_path / "e")])
    msgs.append("epsilon*|Psi_t| < 1" in capsys.readouterr().err)
    injected = []
    for suite, check in (("determinants", "det_J"), ("spectra", "incoming_counts"), ("b0", "char_poly_is_cubic_squared")):
        code = main(["verify", "--suite", suite, "--samples", "20", "--inject", f"{suite}.{check}",
                     "--out", str(tmp_path / "v")])
        out = capsys.readouterr().out
        injected.append(code == 1 and f"failing: {suite}.{check}" in out)
    ok = all(msgs) and code_gate == 2 and code_eig == 2 and all(injected)
    assert criterion(10, ok, f"parallel fields refused (exit {code_gate}), eps|phi_t| >= 1 refused (exit {code_eig}), "
                             f"messages cite conditions {all(msgs)}; injected failures named {injected}")
