"""Boundary spectra, characteristic counting, front-gradient recovery and the
boundary energy form on the interface ``x1 = 0``."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import linalg
from .errors import BoundaryConditionError, InvertibilityError, StabilityError
from .geometry import FrontDerivs, jacobians_at
from .plasma import e_matrix
from .vacuum import assemble_B, assemble_M, assemble_Btilde1, boundary_nu1, btilde1_boundary_explicit

DEFAULT_DELTA = 1e-3
DEFAULT_MU_STAR = 1e-2


@dataclass(frozen=True)
class SpectrumReport:
    closed_form: np.ndarray
    numeric: np.ndarray
    max_abs_diff: float
    incoming: int
    degenerate: bool
    incoming_ws: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["closed_form"] = self.closed_form.tolist()
        d["numeric"] = self.numeric.tolist()
        return d


def btilde1_closed_form(phi_t: float, phi_2: float, phi_3: float, eps: float) -> np.ndarray:
    r = math.sqrt(1.0 + phi_2**2 + phi_3**2)
    e = eps * phi_t
    return np.array([-e - r, -e - r, -e, -e, -e + r, -e + r])


def btilde1_spectrum(phi_t: float, phi_2: float, phi_3: float, eps: float, zero_tol: float = 1e-10) -> SpectrumReport:
    """Eigenvalues of the straightened Maxwell boundary matrix, two ways.

    Incoming characteristics are the negative eigenvalues: 2 when
    ``phi_t < 0``, 4 when ``phi_t > 0``; ``phi_t == 0`` is flagged degenerate
    (two zero eigenvalues) and reported with the strictly negative count.

    Raises:
        InvertibilityError: ``eps |phi_t| >= 1``.
    """
    if not eps * abs(phi_t) < 1.0:
        raise InvertibilityError(f"eps*|phi_t| = {eps * abs(phi_t):.6g}")
    mat = assemble_Btilde1(FrontDerivs(phi_t, 0.0, phi_2, phi_3), eps)
    numeric = linalg.sym_eigvals(mat)
    closed = btilde1_closed_form(phi_t, phi_2, phi_3, eps)
    neg, zero, _ = linalg.signature_count(mat, zero_tol)
    degenerate = phi_t == 0.0 or eps == 0.0
    ws_neg = linalg.signature_count(assemble_B()[0], zero_tol)[0]
    return SpectrumReport(closed, numeric, float(np.max(np.abs(closed - numeric))), neg, degenerate, ws_neg)


def explicit_matches_assembled(phi_t, phi_2, phi_3, eps) -> float:
    """Max entry difference between the explicit and assembled boundary matrices."""
    a = assemble_Btilde1(FrontDerivs(phi_t, 0.0, phi_2, phi_3), eps)
    return float(np.max(np.abs(a - btilde1_boundary_explicit(phi_t, phi_2, phi_3, eps))))


def ws_system_characteristics(zero_tol: float = 1e-10) -> dict:
    """Characteristic counts for the plasma, the starred vacuum system and the front."""
    b1 = linalg.signature_count(assemble_B()[0], zero_tol)
    e12 = linalg.signature_count(-e_matrix(1), zero_tol)
    total = e12[0] + b1[0] + 1
    return {
        "B1_signature": list(b1),
        "minus_E12_signature": list(e12),
        "incoming_plasma": e12[0],
        "incoming_vacuum": b1[0],
        "incoming_front": 1,
        "total_boundary_conditions": total,
        "constant_multiplicity": True,
    }


# ---------------------------------------------------------------------------
# Boundary data


@dataclass(frozen=True)
class HatBoundary:
    """Basic-state quantities at one boundary point.

    ``v`` is the full velocity; its normal part is tied to ``phi_t`` by
    ``v1 = phi_t + v2 phi_2 + v3 phi_3``.  Vacuum fields are given by their
    tangential magnetic components, the normal electric one and the
    derivatives entering the boundary conditions.
    """

    H: np.ndarray
    calH: np.ndarray
    calE1: float = 0.0
    v2: float = 0.0
    v3: float = 0.0
    phi_t: float = 0.0
    phi_2: float = 0.0
    phi_3: float = 0.0
    dt_calH2: float = 0.0
    dt_calH3: float = 0.0
    d2_calE1: float = 0.0
    d3_calE1: float = 0.0
    d2_calH2: float = 0.0
    d3_calH3: float = 0.0
    jump_d1q: float = 0.0
    d1_vN: float = 0.0
    d1_HN: float = 0.0

    @property
    def v(self) -> np.ndarray:
        v1 = self.phi_t + self.v2 * self.phi_2 + self.v3 * self.phi_3
        return np.array([v1, self.v2, self.v3])

    def derivs(self) -> FrontDerivs:
        return FrontDerivs(self.phi_t, 0.0, self.phi_2, self.phi_3)

    def mu(self, eps: float) -> float:
        """Effective electric field seen from the plasma frame."""
        return float(self.calE1 - eps * self.v3 * self.calH[1] + eps * self.v2 * self.calH[2])

    def stability_margin(self) -> float:
        return float(np.linalg.norm(np.cross(self.H, self.calH)))


@dataclass
class BoundaryTrace:
    """Perturbation traces at one boundary point (gamma-weighted variables)."""

    q: float
    u1: float
    h1: float
    W: np.ndarray
    phi: float
    phi_t: float
    phi_2: float
    phi_3: float
    extra: dict = field(default_factory=dict)

    def frak(self, hat: HatBoundary, eps: float) -> np.ndarray:
        """``w = K J^{-1} W`` at the boundary."""
        pack = jacobians_at(hat.derivs(), eps)
        return pack.K @ linalg.solve(pack.J, self.W)


def check_stability(hat: HatBoundary, delta: float = DEFAULT_DELTA) -> float:
    """Return ``|H x calH|`` or raise when below ``delta``."""
    m = hat.stability_margin()
    if m < delta:
        raise StabilityError(f"|H x calH| = {m:.6g} < delta = {delta:.6g}")
    return m


def boundary_residuals(tr: BoundaryTrace, hat: HatBoundary, gamma: float, eps: float) -> dict:
    """Residuals of the front, pressure, electric and constraint conditions."""
    w = tr.frak(hat, eps)
    Ws = tr.W
    phi, pt, p2, p3 = tr.phi, tr.phi_t, tr.phi_2, tr.phi_3
    H2, H3, E1 = hat.calH[1], hat.calH[2], hat.calE1
    return {
        "front": pt + hat.v2 * p2 + hat.v3 * p3 + gamma * phi - phi * hat.d1_vN - tr.u1,
        "pressure": tr.q + hat.jump_d1q * phi - (H2 * Ws[1] + H3 * Ws[2]) + E1 * w[3],
        "E2": Ws[4] - eps * ((pt + gamma * phi) * H3 + phi * hat.dt_calH3) + p2 * E1 + phi * hat.d2_calE1,
        "E3": Ws[5] + eps * ((pt + gamma * phi) * H2 + phi * hat.dt_calH2) + p3 * E1 + phi * hat.d3_calE1,
        "h1_frak": w[0] - (H2 * p2 + H3 * p3 + phi * (hat.d2_calH2 + hat.d3_calH3)),
        "h1_plasma": tr.h1 - (hat.H[1] * p2 + hat.H[2] * p3 - phi * hat.d1_HN),
    }


def manufacture_trace(hat: HatBoundary, gamma: float, eps: float, free) -> BoundaryTrace:
    """Build a trace satisfying every boundary condition from free values.

    ``free = (phi, phi_t, phi_2, phi_3, H*_2, H*_3, E*_1)``; the remaining
    components (``H*_1``, ``E*_2``, ``E*_3``, ``q``, ``u1``, ``h1``) are solved
    for.  ``H*_1`` enters ``h1`` of the frak family linearly, so it is found
    from two evaluations.
    """
    phi, pt, p2, p3, hs2, hs3, es1 = (float(x) for x in free)
    H2, H3, E1 = hat.calH[1], hat.calH[2], hat.calE1
    es2 = eps * ((pt + gamma * phi) * H3 + phi * hat.dt_calH3) - p2 * E1 - phi * hat.d2_calE1
    es3 = -eps * ((pt + gamma * phi) * H2 + phi * hat.dt_calH2) - p3 * E1 - phi * hat.d3_calE1
    h1_target = H2 * p2 + H3 * p3 + phi * (hat.d2_calH2 + hat.d3_calH3)
    pack = jacobians_at(hat.derivs(), eps)

    def frak_of(x):
        return pack.K @ linalg.solve(pack.J, np.array([x, hs2, hs3, es1, es2, es3]))

    c0 = frak_of(0.0)[0]
    c1 = frak_of(1.0)[0] - c0
    W = np.array([(h1_target - c0) / c1, hs2, hs3, es1, es2, es3])
    w = pack.K @ linalg.solve(pack.J, W)
    q = H2 * hs2 + H3 * hs3 - E1 * w[3] - hat.jump_d1q * phi
    u1 = pt + hat.v2 * p2 + hat.v3 * p3 + gamma * phi - phi * hat.d1_vN
    h1 = hat.H[1] * p2 + hat.H[2] * p3 - phi * hat.d1_HN
    return BoundaryTrace(q, u1, h1, W, phi, pt, p2, p3)


@dataclass(frozen=True)
class FrontGradient:
    phi_t: float
    phi_2: float
    phi_3: float
    coefficients: dict


def resolve_front_gradient(
    tr: BoundaryTrace, hat: HatBoundary, gamma: float, eps: float, delta: float = DEFAULT_DELTA
) -> FrontGradient:
    """Recover ``(phi_t, phi_2, phi_3)`` from ``h1``, the frak ``h1``, ``u1`` and ``phi``.

    The two constraint relations form a 2x2 system in ``(phi_2, phi_3)``
    with matrix ``[[H2, H3], [calH2, calH3]]``; ``phi_t`` then follows from
    the front equation.  Also returns the coefficient vectors ``a1..a5`` of
    ``grad phi = a1 h1 + a2 h1_frak + a3 u1 + a4 phi + gamma a5 phi``.

    Raises:
        StabilityError: ``|H x calH| < delta``.
    """
    check_stability(hat, delta)
    D = np.array([[hat.H[1], hat.H[2]], [hat.calH[1], hat.calH[2]]])
    Dinv = linalg.inverse(D)
    vt = np.array([hat.v2, hat.v3])
    c1 = Dinv[:, 0]
    c2 = Dinv[:, 1]
    c4 = Dinv @ np.array([hat.d1_HN, -(hat.d2_calH2 + hat.d3_calH3)])
    coeffs = {
        "a1": np.r_[-vt @ c1, c1],
        "a2": np.r_[-vt @ c2, c2],
        "a3": np.array([1.0, 0.0, 0.0]),
        "a4": np.r_[hat.d1_vN - vt @ c4, c4],
        "a5": np.array([-1.0, 0.0, 0.0]),
    }
    h1_frak = tr.frak(hat, eps)[0]
    g = (
        coeffs["a1"] * tr.h1
        + coeffs["a2"] * h1_frak
        + coeffs["a3"] * tr.u1
        + coeffs["a4"] * tr.phi
        + gamma * coeffs["a5"] * tr.phi
    )
    return FrontGradient(float(g[0]), float(g[1]), float(g[2]), coeffs)


def quadratic_form_A(
    tr: BoundaryTrace,
    hat: HatBoundary,
    gamma: float,
    eps: float,
    tol: float = 1e-9,
    check: bool = True,
) -> tuple[float, float, dict]:
    """Boundary energy form computed directly and through its decomposition.

    Direct: ``-eps q u1 + (M1 W, W)/2`` with ``nu = eps v_hat``.  Decomposed:
    the ``mu``-term plus ``phi`` times the basic-state coefficient block.

    Returns:
        ``(direct, decomposed, terms)``.

    Raises:
        BoundaryConditionError: ``check`` is on and the trace violates a
            boundary condition by more than ``tol`` (relative).
    """
    if check:
        res = boundary_residuals(tr, hat, gamma, eps)
        scale = 1.0 + float(np.max(np.abs(tr.W))) + abs(tr.q) + abs(tr.u1) + abs(tr.phi)
        bad = {k: v for k, v in res.items() if abs(v) > tol * scale}
        if bad:
            raise BoundaryConditionError(
                "trace violates boundary conditions: " + ", ".join(f"{k}={v:.3e}" for k, v in bad.items())
            )
    nu = eps * hat.v
    M1 = assemble_M(nu, hat.derivs(), eps).M[1]
    direct = -eps * tr.q * tr.u1 + 0.5 * tr.W @ M1 @ tr.W
    w = tr.frak(hat, eps)
    e1 = w[3]
    Hs2, Hs3 = tr.W[1], tr.W[2]
    mu = hat.mu(eps)
    mu_term = mu * (tr.phi_3 * Hs2 - tr.phi_2 * Hs3 + eps * (tr.phi_t + gamma * tr.phi) * e1)
    block = (
        eps * tr.q * hat.d1_vN
        + eps * tr.u1 * hat.jump_d1q
        + eps * tr.phi * hat.jump_d1q * hat.d1_vN
        + (Hs3 + eps * hat.v2 * e1) * (eps * hat.dt_calH3 - hat.d2_calE1)
        + (Hs2 - eps * hat.v3 * e1) * (eps * hat.dt_calH2 + hat.d3_calE1)
        + eps * (hat.v2 * Hs2 + hat.v3 * Hs3) * (hat.d2_calH2 + hat.d3_calH3)
    )
    phi_term = tr.phi * block
    terms = {
        "plasma": -eps * tr.q * tr.u1,
        "vacuum": 0.5 * tr.W @ M1 @ tr.W,
        "mu_term": mu_term,
        "phi_term": phi_term,
        "mu": mu,
    }
    return float(direct), float(mu_term + phi_term), terms


def nu1_consistent(hat: HatBoundary, eps: float) -> float:
    """Difference between ``eps v1`` and the characteristic choice of ``nu1``."""
    return float(eps * hat.v[0] - boundary_nu1(eps * hat.v2, eps * hat.v3, hat.phi_t, hat.phi_2, hat.phi_3, eps))
