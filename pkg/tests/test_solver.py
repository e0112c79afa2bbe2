import math

import numpy as np
import pytest

from plasmavac.errors import (
    CFLError, ConfigError, ElectricFieldError, GridError, InadmissibleStateError, NonFiniteError, StabilityError,
)
from plasmavac.solver.basic_state import build_basic_state, flat_static_diagnostics, from_config
from plasmavac.solver.config import SolverConfig, config_from_dict, load_config
from plasmavac.solver.diagnostics import constraint_monitor
from plasmavac.solver.experiments import energy_check, gamma_sweep, simulate
from plasmavac.solver.ibvp import IH1, Discretization, run, step
from plasmavac.solver.mms import mms_convergence

SMALL = dict(n1=16, n2=8, t_final=1.0, forcing_duration=0.5, gamma_list=[2.0, 4.0])


@pytest.fixture(scope="module")
def basic():
    return build_basic_state()


def test_config_collects_every_problem():
    with pytest.raises(ConfigError) as e:
        config_from_dict({"n1": 2, "cfl": 1.5, "gamma_list": [0.5], "bogus": 1})
    text = str(e.value)
    for key in ("n1", "cfl", "gamma_list", "bogus"):
        assert key in text
    assert len(e.value.problems) == 4


def test_config_yaml(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("n1: 16\nn2: 8\ngamma_list: [1, 3]\n")
    cfg = load_config(p)
    assert (cfg.n1, cfg.gamma_list) == (16, [1, 3])
    assert cfg.digest() != SolverConfig().digest()
    p.write_text("n1: [\n")
    with pytest.raises(ConfigError, match="invalid YAML"):
        load_config(p)
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.yaml")


def test_flat_static_examples():
    d = flat_static_diagnostics((0, 1, 0), (0, 0, 1))
    assert d["q_hat"] == pytest.approx(0.5)
    assert d["p_hat"] == pytest.approx(0.0)
    assert d["margin"] == pytest.approx(1.0)
    assert d["mu_hat_at_rest"] == 0.0
    with pytest.raises(InadmissibleStateError):
        build_basic_state(H=(0, 1, 0), calH=(0, 0, 1))


def test_default_state_gates(basic):
    assert basic.mu == 0.0
    assert basic.margin == pytest.approx(math.sqrt(3))
    assert basic.gates == {"stability": True, "velocity": True, "electric_field": True}


def test_electric_field_gate_is_recorded_not_raised():
    b = build_basic_state(calE1=0.5, calH=(0, 0, math.sqrt(3)))
    assert b.mu == pytest.approx(0.5)
    assert not b.gates["electric_field"]
    with pytest.raises(ElectricFieldError):
        b.require_gates()


def test_parallel_fields_refused():
    cfg = SolverConfig(H_hat=[0, 0, 1], calH_hat=[0, 0, 2], **SMALL)
    with pytest.raises(StabilityError):
        simulate(cfg)


def test_zero_data_stays_zero(basic):
    disc = Discretization(basic, 16, 8)
    final = run(disc, 0.5, 0.5)
    assert not (final.U.any() or final.W.any() or final.phi.any())


def test_unforced_energy_does_not_grow(basic):
    rep = energy_check(basic, 32, 16, 1.0)
    assert rep["applicable"] and rep["pass"]


def test_forced_energy_report_not_applicable():
    res = simulate(SolverConfig(**SMALL))
    assert res.energy["applicable"] is False
    assert res.energy["pass"] is None


def test_constraint_violation_persists(basic):
    disc = Discretization(basic, 16, 16)
    s = disc.zero_state()
    X1, X2 = np.meshgrid(disc.x1p, disc.x2, indexing="ij")
    s.U[IH1] = np.exp(-((X1 - 1.0) ** 2) / 0.1)  # div h != 0
    before = constraint_monitor(disc, s)["div_h_interior"]
    after = constraint_monitor(disc, run(disc, 0.5, 0.5, initial=s))["div_h_interior"]
    assert after > 0.2 * before


def test_mms_small_grids(basic):
    orders = mms_convergence(basic, ns=(16, 32))["orders"]
    assert min(orders.values()) > 1.8


def test_unforced_sweep_has_zero_lhs():
    res = gamma_sweep(SolverConfig(forcing="none", **SMALL))
    for row in res["rows"]:
        assert row["lhs"] == 0.0 and row["ratio"] == 0.0


def test_post_and_shifted_weighting_agree():
    post = gamma_sweep(SolverConfig(weighting="post", **SMALL))["rows"]
    shifted = gamma_sweep(SolverConfig(weighting="shifted", **SMALL))["rows"]
    for a, b in zip(post, shifted):
        assert a["ratio"] == pytest.approx(b["ratio"], rel=1e-3)


def test_large_electric_field_is_flagged():
    cfg = SolverConfig(calE1_hat=1.0, override_gates=True, **SMALL)
    res = gamma_sweep(cfg)
    assert res["flagged"]
    assert res["gates"]["electric_field"] is False
    with pytest.raises(ElectricFieldError):
        gamma_sweep(SolverConfig(calE1_hat=1.0, **SMALL))


def test_cfl_and_nonfinite(basic):
    disc = Discretization(basic, 8, 8)
    with pytest.raises(CFLError):
        disc.stable_dt(1.5)
    s = disc.zero_state()
    with pytest.raises(CFLError):
        step(s, 10 * disc.stable_dt(0.5), disc)
    s.U[0, 3, 3] = np.nan
    with pytest.raises(NonFiniteError):
        step(s, disc.stable_dt(0.5), disc)


def test_grid_errors(basic):
    with pytest.raises(GridError):
        Discretization(basic, 2, 8)
    with pytest.raises(GridError):
        Discretization(basic, 8, 8, closure="nope")


def test_from_config_matches_defaults(basic):
    assert from_config(SolverConfig()).summary() == basic.summary()
