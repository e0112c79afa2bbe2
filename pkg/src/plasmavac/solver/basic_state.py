"""Basic states about which the problem is linearized."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    ElectricFieldError,
    InadmissibleStateError,
    PlasmaVacError,
    StabilityError,
    VelocityError,
)
from ..plasma import EquationOfState, PlasmaState, assemble_plasma_matrices

CONSTRAINT_TOL = 1e-12


class BasicStateError(PlasmaVacError, ValueError):
    """The requested basic state violates a structural constraint."""


@dataclass(frozen=True)
class BasicState:
    """Constant, flat basic state: front ``phi_hat = 0``, uniform fields.

    Attributes:
        plasma: plasma state ``(q, v, H, S)``.
        calH, calE: vacuum magnetic and electric fields.
        eps: scaled inverse light speed.
        gates: outcome of each hypothesis check (``True`` = satisfied).
    """

    plasma: PlasmaState
    calH: np.ndarray
    calE: np.ndarray
    eps: float
    delta: float
    mu_star: float
    preset: str = "flat-static"
    gates: dict = field(default_factory=dict)

    @property
    def v(self) -> np.ndarray:
        return self.plasma.v

    @property
    def H(self) -> np.ndarray:
        return self.plasma.H

    @property
    def mu(self) -> float:
        v, cH = self.v, self.calH
        return float(self.calE[0] - self.eps * v[2] * cH[1] + self.eps * v[1] * cH[2])

    @property
    def margin(self) -> float:
        return float(np.linalg.norm(np.cross(self.H, self.calH)))

    @property
    def q_jump(self) -> float:
        return float(self.plasma.q - 0.5 * (self.calH @ self.calH - self.calE @ self.calE))

    def matrices(self):
        return assemble_plasma_matrices(self.plasma)

    def gates_ok(self) -> bool:
        return all(self.gates.values())

    def require_gates(self) -> None:
        """Raise the first failing hypothesis as a :class:`GateError`."""
        if not self.gates.get("stability", True):
            raise StabilityError(f"|H x calH| = {self.margin:.6g}, delta = {self.delta:.6g}")
        if not self.gates.get("velocity", True):
            raise VelocityError(f"|v_hat| = {np.linalg.norm(self.v):.6g}, 1/eps = {1 / self.eps:.6g}")
        if not self.gates.get("electric_field", True):
            raise ElectricFieldError(f"|mu_hat| = {abs(self.mu):.6g}, mu_star = {self.mu_star:.6g}")

    def summary(self) -> dict:
        return {
            "preset": self.preset,
            "q_hat": self.plasma.q,
            "p_hat": self.plasma.p,
            "rho_hat": self.plasma.rho,
            "rho_p_hat": self.plasma.rho_p,
            "v_hat": self.v.tolist(),
            "H_hat": self.H.tolist(),
            "calH_hat": self.calH.tolist(),
            "calE_hat": self.calE.tolist(),
            "epsilon": self.eps,
            "mu_hat": self.mu,
            "margin": self.margin,
            "delta": self.delta,
            "mu_star": self.mu_star,
            "gates": dict(self.gates),
        }


def flat_static_diagnostics(H, calH, calE1: float = 0.0, S: float = 0.0, eos: EquationOfState = EquationOfState()) -> dict:
    """Derived quantities of the flat-static family without building it.

    The pressure balance fixes ``q_hat = (|calH|^2 - calE1^2)/2``; the gas
    pressure ``q_hat - |H|^2/2`` must then be positive.
    """
    H = np.asarray(H, dtype=float)
    calH = np.asarray(calH, dtype=float)
    q = 0.5 * (calH @ calH - calE1 * calE1)
    p = q - 0.5 * (H @ H)
    return {
        "q_hat": float(q),
        "p_hat": float(p),
        "admissible": bool(p > 0),
        "margin": float(np.linalg.norm(np.cross(H, calH))),
        "mu_hat_at_rest": float(calE1),
    }


def build_basic_state(preset: str = "flat-static", **params) -> BasicState:
    """Construct a basic state and evaluate its hypothesis gates.

    Keyword parameters for ``flat-static``: ``H``, ``calH`` (normal components
    must vanish), ``calE1``, ``v`` (normal component must vanish), ``S``,
    ``eps``, ``delta``, ``mu_star``.  The vacuum electric field is
    ``(calE1, 0, 0)``, which keeps its tangential traces zero on the flat
    front, and ``q_hat`` follows from pressure balance.

    Gate failures (stability margin, velocity, ``|mu_hat|``) do not raise;
    they are recorded in ``gates`` for the caller to act on.

    Raises:
        BasicStateError: unknown preset or a structural constraint fails.
        InadmissibleStateError: pressure balance leaves a non-positive gas pressure.
    """
    if preset != "flat-static":
        raise BasicStateError(f"unknown preset {preset!r}")
    H = np.asarray(params.get("H", (0.0, 1.0, 0.0)), dtype=float)
    calH = np.asarray(params.get("calH", (0.0, 0.0, 3.0**0.5)), dtype=float)
    calE1 = float(params.get("calE1", 0.0))
    v = np.asarray(params.get("v", (0.0, 0.0, 0.0)), dtype=float)
    S = float(params.get("S", 0.0))
    eps = float(params.get("eps", 0.5))
    delta = float(params.get("delta", 1e-3))
    mu_star = float(params.get("mu_star", 1e-2))
    eos = params.get("eos", EquationOfState())
    if not 0.0 < eps < 1.0:
        raise BasicStateError(f"epsilon must lie in (0, 1), got {eps}")
    problems = []
    if abs(H[0]) > CONSTRAINT_TOL:
        problems.append("normal plasma field H_1 must vanish on the flat front")
    if abs(calH[0]) > CONSTRAINT_TOL:
        problems.append("normal vacuum field calH_1 must vanish so that h_1 = 0 on the boundary")
    if abs(v[0]) > CONSTRAINT_TOL:
        problems.append("normal velocity v_1 must vanish since phi_t = v_N = 0")
    if problems:
        raise BasicStateError("; ".join(problems))
    diag = flat_static_diagnostics(H, calH, calE1, S, eos)
    if not diag["admissible"]:
        raise InadmissibleStateError(
            f"pressure balance gives q_hat = {diag['q_hat']:.6g} and gas pressure "
            f"p_hat = {diag['p_hat']:.6g} <= 0; increase |calH| or decrease |H|"
        )
    plasma = PlasmaState(diag["q_hat"], v, H, S, eos)
    calE = np.array([calE1, 0.0, 0.0])
    state = BasicState(plasma, calH, calE, eps, delta, mu_star)
    gates = {
        "stability": state.margin >= delta,
        "velocity": bool(np.linalg.norm(v) < 1.0 / eps),
        "electric_field": abs(state.mu) <= mu_star,
    }
    object.__setattr__(state, "gates", gates)
    if abs(state.q_jump) > CONSTRAINT_TOL:
        raise BasicStateError(f"pressure jump {state.q_jump:.3e} is not zero")
    return state


def from_config(cfg) -> BasicState:
    return build_basic_state(
        cfg.preset,
        H=cfg.H_hat,
        calH=cfg.calH_hat,
        calE1=cfg.calE1_hat,
        v=cfg.v_hat,
        S=cfg.S_hat,
        eps=cfg.epsilon,
        delta=cfg.delta,
        mu_star=cfg.mu_star,
    )
