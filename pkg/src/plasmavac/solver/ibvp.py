"""Semi-discrete coupled problem and its RK4 time integration.

Layout (x3-invariant): plasma on ``[0, Lp]``, vacuum on ``[-Lv, 0]``, both
with ``n1 + 1`` nodes in ``x1`` and ``n2`` periodic nodes in ``x2``.  The
front lives on the ``x2`` grid.

The plasma block ``A0 U_t + A1 U_1 + A2 U_2 = F`` and the vacuum block
``eps W_t + B1 W_1 + B2 W_2 = F_v`` use the SBP first derivative in ``x1``
and a periodic central difference in ``x2``.  Interface and outer
conditions are imposed weakly by penalty terms built on the characteristic
boundary conditions:

* pressure balance  ``q = calH . H* - calE1 E*_1``,
* tangential electric field ``E*_2 = eps calH3 phi_t - calE1 phi_2`` and
  ``E*_3 = -eps calH2 phi_t``,
* front motion ``phi_t = u_1 - v2 phi_2``.

With ``sat-neutral`` the discrete energy
``eps/2 sum H (U.A0 U + |W|^2)`` is conserved across the interface when
``v_hat = 0`` and ``calE1 = 0``; ``sat-upwind`` subtracts the squared
residuals on top of that.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import linalg
from ..errors import CFLError, GridError, NonFiniteError
from ..vacuum import assemble_B
from . import sbp
from .basic_state import BasicState

IQ, IU1, IH1, IH2, IH3 = 0, 1, 4, 5, 6
WH1, WH2, WH3, WE1, WE2, WE3 = range(6)


def _split(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Positive and negative semidefinite parts of a symmetric matrix."""
    w, v = linalg.sym_eigen(m)
    pos = (v * np.maximum(w, 0.0)) @ v.T
    neg = (v * np.minimum(w, 0.0)) @ v.T
    return pos, neg


@dataclass
class SimState:
    t: float
    U: np.ndarray  # (8, n1+1, n2) plasma
    W: np.ndarray  # (6, n1+1, n2) vacuum
    phi: np.ndarray  # (n2,)

    def copy(self) -> "SimState":
        return SimState(self.t, self.U.copy(), self.W.copy(), self.phi.copy())

    def finite(self) -> bool:
        return bool(np.all(np.isfinite(self.U)) and np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.phi)))


@dataclass
class Rates:
    U: np.ndarray
    W: np.ndarray
    phi: np.ndarray
    phi_phys: np.ndarray  # front velocity entering the boundary conditions


class Forcing:
    """Zero forcing; subclasses override what they need.

    ``boundary`` returns ``(g_q, g2, g3, g_R, g_L)`` or ``None``.
    """

    def plasma(self, t: float, disc: "Discretization"):
        return None

    def plasma_dt(self, t: float, disc: "Discretization"):
        return None

    def vacuum(self, t: float, disc: "Discretization"):
        return None

    def front(self, t: float, disc: "Discretization"):
        return None

    def boundary(self, t: float, disc: "Discretization"):
        return None


class PulseForcing(Forcing):
    """Momentum source ``a sin^2(pi t/T) exp(-((x1-1)/0.25)^2) cos x2`` on ``t < T``."""

    def __init__(self, amplitude: float = 1.0, duration: float = 1.0, center: float = 1.0, width: float = 0.25):
        self.amplitude = amplitude
        self.duration = duration
        self.center = center
        self.width = width

    def _shape(self, disc):
        g = np.exp(-(((disc.x1p - self.center) / self.width) ** 2))
        return g[:, None] * np.cos(disc.x2)[None, :]

    def _profile(self, t):
        if t >= self.duration or t <= 0.0:
            return 0.0, 0.0
        s = math.sin(math.pi * t / self.duration)
        return s * s, math.pi / self.duration * math.sin(2.0 * math.pi * t / self.duration)

    def plasma(self, t, disc):
        s, _ = self._profile(t)
        F = np.zeros(disc.shape_p)
        if s:
            F[IU1] = self.amplitude * s * self._shape(disc)
        return F

    def plasma_dt(self, t, disc):
        _, ds = self._profile(t)
        F = np.zeros(disc.shape_p)
        if ds:
            F[IU1] = self.amplitude * ds * self._shape(disc)
        return F


@dataclass
class Discretization:
    basic: BasicState
    n1: int
    n2: int
    length_plasma: float = 2.0
    length_vacuum: float = 2.0
    closure: str = "sat-upwind"
    shift: float = 0.0
    mats: dict = field(init=False, repr=False)

    def __post_init__(self):
        if self.n1 < 4 or self.n2 < 4:
            raise GridError("need at least 4 cells in x1 and 4 points in x2")
        if abs(self.length_plasma / self.n1 - self.length_vacuum / self.n1) > 1e-14:
            raise GridError("plasma and vacuum slabs must share the x1 step")
        self.h1 = self.length_plasma / self.n1
        self.h2 = 2.0 * math.pi / self.n2
        self.x1p = np.linspace(0.0, self.length_plasma, self.n1 + 1)
        self.x1v = np.linspace(-self.length_vacuum, 0.0, self.n1 + 1)
        self.x2 = np.arange(self.n2) * self.h2
        self.hw = sbp.norm_weights(self.n1 + 1, self.h1)
        A0, A1, A2, _ = self.basic.matrices()
        B1, B2, _ = assemble_B()
        A1p, A1m = _split(A1)
        B1p, B1m = _split(B1)
        self.mats = {
            "A0": A0,
            "A0inv": linalg.inverse(A0),
            "A1": A1,
            "A2": A2,
            "A1m": A1m,
            "B1": B1,
            "B2": B2,
            "B1p": B1p,
        }
        if self.closure == "sat-upwind":
            self.alpha = self.beta = 1.0
        elif self.closure == "sat-neutral":
            self.alpha = self.beta = 0.0
        else:
            raise GridError(f"unknown closure {self.closure!r}")

    @property
    def shape_p(self):
        return (8, self.n1 + 1, self.n2)

    @property
    def shape_v(self):
        return (6, self.n1 + 1, self.n2)

    @property
    def eps(self) -> float:
        return self.basic.eps

    def max_speed(self) -> float:
        return max(self.basic.plasma.fast_speed(), 1.0 / self.eps)

    def stable_dt(self, cfl: float) -> float:
        if not 0.0 < cfl < 1.0:
            raise CFLError(f"CFL number {cfl} outside (0, 1)")
        return cfl * min(self.h1, self.h2) / self.max_speed()

    def zero_state(self) -> SimState:
        return SimState(0.0, np.zeros(self.shape_p), np.zeros(self.shape_v), np.zeros(self.n2))

    # -- operators ---------------------------------------------------------

    def d2(self, f):
        return sbp.d_periodic(f, self.h2, axis=-1)

    def d1(self, f):
        return sbp.d1(f, self.h1, axis=-2)

    def residuals(self, U, W, phi, phi_phys, g=None):
        """Interface residuals ``(r_q, r_2, r_3)`` on the x2 grid."""
        b = self.basic
        cH, E1 = b.calH, b.calE[0]
        Hs = W[:3, -1]
        Es = W[3:, -1]
        dphi = self.d2(phi)
        rq = U[IQ, 0] - (cH[1] * Hs[1] + cH[2] * Hs[2] - E1 * Es[0])
        r2 = Es[1] - (self.eps * cH[2] * phi_phys - E1 * dphi)
        r3 = Es[2] + self.eps * cH[1] * phi_phys
        if g is not None:
            rq = rq - g[0]
            r2 = r2 - g[1]
            r3 = r3 - g[2]
        return rq, r2, r3

    def rates(self, s: SimState, forcing: Forcing) -> Rates:
        m = self.mats
        b = self.basic
        eps = self.eps
        t = s.t
        U, W, phi = s.U, s.W, s.phi
        wt = math.exp(-self.shift * t) if self.shift else 1.0
        g = forcing.boundary(t, self)
        if g is not None and self.shift:
            g = tuple(None if x is None else wt * x for x in g)

        ff = forcing.front(t, self)
        phi_phys = U[IU1, 0] - b.v[1] * self.d2(phi)
        if ff is not None:
            phi_phys = phi_phys + wt * ff
        rq, r2, r3 = self.residuals(U, W, phi, phi_phys, g)
        H00 = self.hw[0]

        # plasma
        R = -np.einsum("ij,jkl->ikl", m["A1"], self.d1(U)) - np.einsum("ij,jkl->ikl", m["A2"], self.d2(U))
        F = forcing.plasma(t, self)
        if F is not None:
            R += wt * F
        cH = b.calH
        R[IU1, 0] += (-rq + self.beta * (r2 * cH[2] - r3 * cH[1])) / H00
        R[IQ, 0] += -self.alpha * rq / H00
        gR = None if g is None else g[3]
        UR = U[:, -1] if gR is None else U[:, -1] - gR
        R[:, -1] += (m["A1m"] @ UR) / H00
        Ut = np.einsum("ij,jkl->ikl", m["A0inv"], R)

        # vacuum
        RW = -np.einsum("ij,jkl->ikl", m["B1"], self.d1(W)) - np.einsum("ij,jkl->ikl", m["B2"], self.d2(W))
        Fv = forcing.vacuum(t, self)
        if Fv is not None:
            RW += wt * Fv
        E1 = b.calE[0]
        sv = np.zeros((6, self.n2))
        sv[WH3] += r2
        sv[WH2] -= r3
        sv[WH2] += eps * self.alpha * rq * cH[1]
        sv[WH3] += eps * self.alpha * rq * cH[2]
        sv[WE1] -= eps * self.alpha * rq * E1
        sv[WE2] -= self.beta * r2
        sv[WE3] -= self.beta * r3
        RW[:, -1] += sv / H00
        gL = None if g is None else g[4]
        WL = W[:, 0] if gL is None else W[:, 0] - gL
        RW[:, 0] -= (m["B1p"] @ WL) / H00
        Wt = RW / eps

        phit = phi_phys
        if self.shift:
            Ut = Ut - self.shift * U
            Wt = Wt - self.shift * W
            phit = phit - self.shift * phi
        return Rates(Ut, Wt, phit, phi_phys)

    # -- diagnostics -------------------------------------------------------

    def energy(self, s: SimState) -> float:
        """``eps/2 sum H (U.A0 U + |W|^2)`` with the x2 rectangle weight."""
        A0 = self.mats["A0"]
        ep = np.einsum("ikl,ij,jkl->kl", s.U, A0, s.U)
        ev = np.sum(s.W * s.W, axis=0)
        w = self.hw[:, None] * self.h2
        return 0.5 * self.eps * math.fsum((w * (ep + ev)).ravel().tolist())


def rk4_step(disc: Discretization, s: SimState, dt: float, forcing: Forcing, k1: Rates | None = None) -> SimState:
    """One classical RK4 step; ``k1`` may be supplied if already evaluated."""

    def add(base: SimState, k: Rates, c: float) -> SimState:
        return SimState(base.t + c, base.U + c * k.U, base.W + c * k.W, base.phi + c * k.phi)

    k1 = disc.rates(s, forcing) if k1 is None else k1
    k2 = disc.rates(add(s, k1, 0.5 * dt), forcing)
    k3 = disc.rates(add(s, k2, 0.5 * dt), forcing)
    k4 = disc.rates(add(s, k3, dt), forcing)
    w = dt / 6.0
    return SimState(
        s.t + dt,
        s.U + w * (k1.U + 2 * k2.U + 2 * k3.U + k4.U),
        s.W + w * (k1.W + 2 * k2.W + 2 * k3.W + k4.W),
        s.phi + w * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi),
    )


def step(s: SimState, dt: float, disc: Discretization, forcing: Forcing | None = None, cfl: float = 0.99) -> SimState:
    """Advance one step after checking the CFL bound and finiteness."""
    limit = disc.stable_dt(cfl)
    if dt > limit * (1 + 1e-12):
        raise CFLError(f"dt = {dt:.3e} exceeds CFL limit {limit:.3e}")
    out = rk4_step(disc, s, dt, forcing or Forcing())
    if not out.finite():
        raise NonFiniteError(0, "step")
    return out


def time_grid(t_final: float, dt_max: float) -> tuple[int, float]:
    """Uniform step count and size not exceeding ``dt_max``."""
    n = max(1, int(math.ceil(t_final / dt_max - 1e-12)))
    return n, t_final / n


def run(disc: Discretization, t_final: float, cfl: float, forcing: Forcing | None = None,
        initial: SimState | None = None, observers=()) -> SimState:
    """Integrate to ``t_final``.

    Each observer is called as ``obs(n, state, rates, dt)`` for
    ``n = 0..nsteps`` with the rates at that state; observers see the final
    state too.

    Raises:
        CFLError: ``cfl`` outside (0, 1).
        NonFiniteError: a NaN or Inf appeared (reports the step index).
    """
    forcing = forcing or Forcing()
    n, dt = time_grid(t_final, disc.stable_dt(cfl))
    s = disc.zero_state() if initial is None else initial.copy()
    for k in range(n + 1):
        rates = disc.rates(s, forcing)
        for obs in observers:
            obs(k, s, rates, dt)
        if k == n:
            break
        s = rk4_step(disc, s, dt, forcing, k1=rates)
        if not s.finite():
            raise NonFiniteError(k + 1, "time loop")
    return s
