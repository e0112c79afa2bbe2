"""Manufactured solutions for convergence studies."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ibvp import IQ, IU1, Discretization, Forcing, SimState, run
from ..vacuum import order_fit


@dataclass(frozen=True)
class TrigField:
    """Components ``amp_k sin(a_k x1 + b_k x2 + c_k t + d_k)`` (``b_k`` integer)."""

    amp: np.ndarray
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, scale: float = 1.0) -> "TrigField":
        return cls(
            scale * rng.uniform(0.5, 1.0, n),
            rng.uniform(0.5, 1.5, n),
            rng.integers(1, 3, n).astype(float),
            rng.uniform(-1.0, 1.0, n),
            rng.uniform(0.0, 2.0 * math.pi, n),
        )

    def _arg(self, t, x1, x2):
        return (
            self.a[:, None, None] * x1[None, :, None]
            + self.b[:, None, None] * x2[None, None, :]
            + self.c[:, None, None] * t
            + self.d[:, None, None]
        )

    def value(self, t, x1, x2):
        return self.amp[:, None, None] * np.sin(self._arg(t, x1, x2))

    def deriv(self, t, x1, x2, which: str):
        coef = {"t": self.c, "x1": self.a, "x2": self.b}[which]
        return (self.amp * coef)[:, None, None] * np.cos(self._arg(t, x1, x2))


class ManufacturedForcing(Forcing):
    """Sources and boundary data that make ``(U*, W*, phi*)`` exact."""

    def __init__(self, disc: Discretization, seed: int = 7):
        rng = np.random.default_rng(seed)
        self.Uf = TrigField.random(8, rng)
        self.Wf = TrigField.random(6, rng)
        self.phi_amp, self.phi_c, self.phi_d = 0.3, -0.7, 0.4
        self.disc = disc

    # exact fields
    def U(self, t, x1=None):
        d = self.disc
        return self.Uf.value(t, d.x1p if x1 is None else x1, d.x2)

    def W(self, t, x1=None):
        d = self.disc
        return self.Wf.value(t, d.x1v if x1 is None else x1, d.x2)

    def phi(self, t):
        return self.phi_amp * np.sin(self.disc.x2 + self.phi_c * t + self.phi_d)

    def phi_t(self, t):
        return self.phi_amp * self.phi_c * np.cos(self.disc.x2 + self.phi_c * t + self.phi_d)

    def phi_2(self, t):
        return self.phi_amp * np.cos(self.disc.x2 + self.phi_c * t + self.phi_d)

    def exact(self, t) -> SimState:
        return SimState(t, self.U(t), self.W(t), self.phi(t))

    # sources
    def plasma(self, t, disc):
        m = disc.mats
        x1 = disc.x1p
        f = self.Uf
        return (
            np.einsum("ij,jkl->ikl", m["A0"], f.deriv(t, x1, disc.x2, "t"))
            + np.einsum("ij,jkl->ikl", m["A1"], f.deriv(t, x1, disc.x2, "x1"))
            + np.einsum("ij,jkl->ikl", m["A2"], f.deriv(t, x1, disc.x2, "x2"))
        )

    def vacuum(self, t, disc):
        m = disc.mats
        x1 = disc.x1v
        f = self.Wf
        return (
            disc.eps * f.deriv(t, x1, disc.x2, "t")
            + np.einsum("ij,jkl->ikl", m["B1"], f.deriv(t, x1, disc.x2, "x1"))
            + np.einsum("ij,jkl->ikl", m["B2"], f.deriv(t, x1, disc.x2, "x2"))
        )

    def front(self, t, disc):
        u1 = self.U(t, np.array([0.0]))[IU1, 0]
        return self.phi_t(t) - u1 + disc.basic.v[1] * self.phi_2(t)

    def boundary(self, t, disc):
        b = disc.basic
        cH, E1, eps = b.calH, b.calE[0], b.eps
        U0 = self.U(t, np.array([0.0]))[:, 0]
        W0 = self.W(t, np.array([0.0]))[:, 0]
        pt, p2 = self.phi_t(t), self.phi_2(t)
        gq = U0[IQ] - (cH[1] * W0[1] + cH[2] * W0[2] - E1 * W0[3])
        g2 = W0[4] - (eps * cH[2] * pt - E1 * p2)
        g3 = W0[5] + eps * cH[1] * pt
        gR = self.U(t, np.array([disc.length_plasma]))[:, 0]
        gL = self.W(t, np.array([-disc.length_vacuum]))[:, 0]
        return gq, g2, g3, gR, gL


def mms_errors(basic, n1: int, t_final: float = 0.5, cfl: float = 0.5, closure: str = "sat-upwind", seed: int = 7) -> dict:
    """Max-norm errors of each block at ``t_final`` on an ``n1 x n1`` grid."""
    disc = Discretization(basic, n1, n1, closure=closure)
    forcing = ManufacturedForcing(disc, seed)
    final = run(disc, t_final, cfl, forcing, initial=forcing.exact(0.0))
    ex = forcing.exact(final.t)
    return {
        "n1": n1,
        "h": disc.h1,
        "plasma": float(np.max(np.abs(final.U - ex.U))),
        "vacuum": float(np.max(np.abs(final.W - ex.W))),
        "front": float(np.max(np.abs(final.phi - ex.phi))),
    }


def mms_convergence(basic, ns=(16, 32, 64), **kw) -> dict:
    rows = [mms_errors(basic, n, **kw) for n in ns]
    hs = [r["h"] for r in rows]
    orders = {k: order_fit(hs, [r[k] for r in rows]) for k in ("plasma", "vacuum", "front")}
    return {"rows": rows, "orders": orders}
