"""Complete runs: simulation with diagnostics, gamma sweeps, constraint study."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..vacuum import order_fit
from .basic_state import BasicState, from_config
from .config import SolverConfig
from .diagnostics import (
    BoundaryFormRecorder,
    ConstraintRecorder,
    EnergyRecorder,
    WeightedNormAccumulator,
    constraint_monitor,
)
from .ibvp import Discretization, Forcing, PulseForcing, SimState, run, time_grid


@dataclass
class RunResult:
    config: SolverConfig
    basic: BasicState
    final: SimState
    table: list
    energy: dict
    constraints: list
    boundary_form: dict
    snapshots: list = field(default_factory=list)
    norm_meta: dict = field(default_factory=dict)
    nsteps: int = 0
    dt: float = 0.0
    energy_series: tuple = ((), ())
    grid: dict = field(default_factory=dict)


class SnapshotRecorder:
    def __init__(self, nsteps: int, count: int):
        self.keep = set(np.linspace(0, nsteps, max(count, 1)).round().astype(int).tolist()) if count else set()
        self.frames: list[SimState] = []

    def __call__(self, n, s, rates, dt):
        if n in self.keep:
            self.frames.append(s.copy())


def make_forcing(cfg: SolverConfig) -> Forcing:
    if cfg.forcing == "pulse":
        return PulseForcing(cfg.forcing_amplitude, cfg.forcing_duration)
    return Forcing()


def simulate(cfg: SolverConfig, basic: BasicState | None = None, shift: float | None = None) -> RunResult:
    """Run one configuration with every observer attached.

    Raises:
        GateError: a hypothesis gate fails and ``override_gates`` is off.
    """
    basic = from_config(cfg) if basic is None else basic
    if not cfg.override_gates:
        basic.require_gates()
    disc = Discretization(basic, cfg.n1, cfg.n2, cfg.length_plasma, cfg.length_vacuum, cfg.closure,
                          shift=shift or 0.0)
    forcing = make_forcing(cfg)
    nsteps, dt = time_grid(cfg.t_final, disc.stable_dt(cfg.cfl))
    gammas = [shift] if shift else cfg.gamma_list
    energy = EnergyRecorder(disc, unforced=cfg.forcing == "none")
    cons = ConstraintRecorder(disc, every=max(1, nsteps // 50))
    norms = WeightedNormAccumulator(disc, gammas, forcing, shifted=bool(shift), taper=cfg.taper)
    bform = BoundaryFormRecorder(disc)
    bform.set_steps(nsteps)
    snaps = SnapshotRecorder(nsteps, cfg.snapshots if cfg.dump_fields else 0)
    final = run(disc, cfg.t_final, cfg.cfl, forcing, observers=[energy, cons, norms, bform, snaps])
    norms.finish()
    return RunResult(
        config=cfg,
        basic=basic,
        final=final,
        table=norms.table(),
        energy=energy.report(),
        constraints=cons.rows,
        boundary_form=bform.report(gamma=min(gammas)),
        snapshots=snaps.frames,
        norm_meta=norms.metadata(),
        nsteps=nsteps,
        dt=dt,
        energy_series=(np.asarray(energy.t), np.asarray(energy.E)),
        grid={"x1_plasma": disc.x1p, "x1_vacuum": disc.x1v, "x2": disc.x2},
    )


def sweep_trend(rows: list[dict]) -> dict:
    """Boundedness indicators of ``R(gamma)`` over the sweep."""
    g = np.array([r["gamma"] for r in rows])
    R = np.array([r["ratio"] for r in rows])
    finite = np.all(np.isfinite(R)) and np.all(R > 0)
    spread = float(np.max(R) / np.min(R)) if finite else math.inf
    tail = R[-3:]
    growth = bool(tail.size == 3 and tail[0] < tail[1] < tail[2])
    gamma0 = None
    for i in range(len(R)):
        if np.all(np.diff(R[i:]) <= 0):
            gamma0 = float(g[i])
            break
    return {
        "max_over_min": spread,
        "monotone_growth_tail": growth,
        "empirical_gamma0": gamma0,
        "bounded": bool(finite and spread <= 10.0 and not growth),
    }


def gamma_sweep(cfg: SolverConfig) -> dict:
    """``R(gamma)`` table for the configured gammas.

    ``weighting = "post"`` reuses one run; ``"shifted"`` integrates the
    weighted system once per gamma.
    """
    basic = from_config(cfg)
    if not cfg.override_gates:
        basic.require_gates()
    if cfg.weighting == "post":
        res = simulate(cfg, basic)
        rows, runs = res.table, [res]
    else:
        runs = [simulate(cfg, basic, shift=float(g)) for g in cfg.gamma_list]
        rows = [r.table[0] for r in runs]
    return {
        "rows": rows,
        "trend": sweep_trend(rows),
        "gates": dict(basic.gates),
        "flagged": not basic.gates_ok(),
        "runs": runs,
    }


# ---------------------------------------------------------------------------
# Unforced energy check


def vacuum_pulse(disc: Discretization, center: float = -0.8, width: float = 0.2) -> SimState:
    """Vacuum-only initial data: a Gaussian slab in ``calH3`` and ``calE2``.

    ``calH3`` only varies in ``(x1, x2)`` and ``calE2`` only in ``x1``, so both
    divergences vanish.
    """
    s = disc.zero_state()
    X1, X2 = np.meshgrid(disc.x1v, disc.x2, indexing="ij")
    g = np.exp(-(((X1 - center) / width) ** 2))
    s.W[2] = g * np.cos(X2)
    s.W[4] = g
    return s


def energy_check(basic: BasicState, n1: int = 64, n2: int = 32, t_final: float = 3.0, cfl: float = 0.5,
                 closure: str = "sat-upwind", tol: float = 1e-10) -> dict:
    """Per-step relative energy change of a source-free run from :func:`vacuum_pulse`."""
    disc = Discretization(basic, n1, n2, closure=closure)
    rec = EnergyRecorder(disc, unforced=True)
    run(disc, t_final, cfl, initial=vacuum_pulse(disc), observers=[rec])
    out = rec.report(tol)
    out.update(n1=n1, n2=n2, t_final=t_final, closure=closure)
    return out


# ---------------------------------------------------------------------------
# Constraint refinement study


def divergence_free_data(disc: Discretization) -> SimState:
    """Smooth initial data with analytically divergence-free fields.

    Magnetic and electric fields come from stream functions, so only the
    discrete truncation error makes their discrete divergence nonzero; the
    front is chosen to satisfy both boundary constraints exactly in the
    continuum.
    """
    b = disc.basic
    s = disc.zero_state()
    X1, X2 = np.meshgrid(disc.x1p, disc.x2, indexing="ij")
    # plasma: h = (d2 A, -d1 A, h3), A = exp(-(x1-1)^2) sin(x2)
    g = np.exp(-((X1 - 1.0) ** 2))
    s.U[4] = g * np.cos(X2)
    s.U[5] = 2.0 * (X1 - 1.0) * g * np.sin(X2)
    s.U[6] = 0.5 * g * np.cos(2 * X2)
    s.U[1] = 0.3 * g * np.sin(X2)
    Y1, Y2 = np.meshgrid(disc.x1v, disc.x2, indexing="ij")
    gv = np.exp(-((Y1 + 1.0) ** 2))
    # vacuum: A_v = x1 gv cos(x2) vanishes on the interface
    s.W[0] = -Y1 * gv * np.sin(Y2)
    s.W[1] = -(gv - 2.0 * Y1 * (Y1 + 1.0) * gv) * np.cos(Y2)
    # electric: B_v = gv sin(2 x2)
    s.W[3] = 2.0 * gv * np.cos(2 * Y2)
    s.W[4] = 2.0 * (Y1 + 1.0) * gv * np.sin(2 * Y2)
    s.W[5] = 0.2 * gv
    # front: H2 phi_2 = d2 A(0, x2); calH2 phi_2 = 0 holds whenever calH2 = 0
    if abs(b.H[1]) > 0:
        s.phi = math.exp(-1.0) * np.sin(disc.x2) / b.H[1]
    return s


def constraint_study(basic: BasicState, n1: int = 32, coarse_steps: int = 100, cfl: float = 0.5) -> dict:
    """Two-grid comparison of constraint residuals after a fixed time.

    The coarse grid runs ``coarse_steps`` steps; the fine grid (``2 n1``)
    runs to the same final time.
    """
    out = {}
    for tag, n in (("coarse", n1), ("fine", 2 * n1)):
        disc = Discretization(basic, n, n)
        dt_c = Discretization(basic, n1, n1).stable_dt(cfl)
        t_final = coarse_steps * dt_c
        init = divergence_free_data(disc)
        start = constraint_monitor(disc, init)
        final = run(disc, t_final, cfl, initial=init)
        out[tag] = {"h": disc.h1, "initial": start, "final": constraint_monitor(disc, final), "t_final": t_final}
    c, f = out["coarse"]["final"], out["fine"]["final"]
    out["ratio_interior"] = c["max_interior"] / f["max_interior"] if f["max_interior"] > 0 else math.inf
    out["ratio_full"] = (
        max(c["div_h_full"], c["div_h_vac_full"], c["div_e_vac_full"])
        / max(f["div_h_full"], f["div_h_vac_full"], f["div_e_vac_full"])
    )
    out["ratio_boundary"] = c["max_boundary"] / f["max_boundary"] if f["max_boundary"] > 0 else math.inf
    out["order_interior"] = order_fit([out["coarse"]["h"], out["fine"]["h"]], [c["max_interior"], f["max_interior"]])
    return out
