"""Ideal polytropic MHD in symmetric form.

State ordering throughout: ``U = (q, v1, v2, v3, H1, H2, H3, S)`` with total
pressure ``q = p + |H|^2/2``.  The secondary unknown ``(q, u, h, S)`` uses
``u = eta v`` and ``h = eta H``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import GridError, InadmissibleStateError, JacobianDegenerateError, SingularMatrixError
from .geometry import FrontDerivs, eta_matrix

RHO_MIN = 1e-8
RHO_P_MIN = 1e-8


@dataclass(frozen=True)
class EquationOfState:
    """``p = A rho^Gamma exp(S)``."""

    A: float = 1.0
    gamma_ad: float = 5.0 / 3.0

    def __post_init__(self):
        if not self.A > 0:
            raise ValueError(f"pressure scale A must be positive, got {self.A}")
        if not self.gamma_ad > 1:
            raise ValueError(f"adiabatic exponent must exceed 1, got {self.gamma_ad}")

    def pressure(self, rho, S):
        return self.A * np.asarray(rho, dtype=float) ** self.gamma_ad * np.exp(S)


def eos_eval(q, H, S, eos: EquationOfState = EquationOfState()):
    """Return ``(rho, rho_p, p)`` from total pressure, field and entropy.

    Raises:
        InadmissibleStateError: the gas pressure ``q - |H|^2/2`` is not positive.
    """
    H = np.asarray(H, dtype=float)
    p = np.asarray(q, dtype=float) - 0.5 * np.sum(H * H, axis=0)
    if np.any(~(p > 0)):
        raise InadmissibleStateError(f"non-positive gas pressure p = {float(np.min(p)):.6g}")
    rho = (p * np.exp(-np.asarray(S, dtype=float)) / eos.A) ** (1.0 / eos.gamma_ad)
    rho_p = rho / (eos.gamma_ad * p)
    if np.ndim(p) == 0:
        return float(rho), float(rho_p), float(p)
    return rho, rho_p, p


@dataclass(frozen=True)
class PlasmaState:
    q: float
    v: np.ndarray
    H: np.ndarray
    S: float = 0.0
    eos: EquationOfState = field(default_factory=EquationOfState)

    def __post_init__(self):
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))
        object.__setattr__(self, "H", np.asarray(self.H, dtype=float).reshape(3))
        rho, rho_p, _ = eos_eval(self.q, self.H, self.S, self.eos)
        if rho < RHO_MIN or rho_p < RHO_P_MIN:
            raise InadmissibleStateError(
                f"hyperbolicity requires rho, rho_p above margin (rho={rho:.3g}, rho_p={rho_p:.3g})"
            )

    @classmethod
    def from_vector(cls, U, eos: EquationOfState = EquationOfState()) -> "PlasmaState":
        U = np.asarray(U, dtype=float)
        return cls(U[0], U[1:4], U[4:7], U[7], eos)

    def vector(self) -> np.ndarray:
        return np.concatenate([[self.q], self.v, self.H, [self.S]])

    @property
    def p(self) -> float:
        return self.q - 0.5 * float(self.H @ self.H)

    @property
    def rho(self) -> float:
        return eos_eval(self.q, self.H, self.S, self.eos)[0]

    @property
    def rho_p(self) -> float:
        return eos_eval(self.q, self.H, self.S, self.eos)[1]

    def fast_speed(self) -> float:
        """Upper bound of characteristic speeds: ``|v| + sqrt(c_s^2 + |H|^2/rho)``."""
        rho, rho_p, _ = eos_eval(self.q, self.H, self.S, self.eos)
        cs2 = 1.0 / rho_p
        return float(np.linalg.norm(self.v) + math.sqrt(cs2 + self.H @ self.H / rho))


def e_matrix(j: int) -> np.ndarray:
    """8x8 matrix with ones at ``(0, j)`` and ``(j, 0)`` (``E_{1,j+1}``, 1-based)."""
    m = np.zeros((8, 8))
    m[0, j] = m[j, 0] = 1.0
    return m


def _a0_blocks(rho_block, a, h_block, g) -> np.ndarray:
    """Symmetrizer layout shared by ``A0`` and its secondary analogue.

    ``g`` enters the ``q``-field coupling ``-a g`` and the rank-one term
    ``a g g^T`` added to ``h_block``.
    """
    m = np.zeros((8, 8))
    m[0, 0] = a
    m[0, 4:7] = m[4:7, 0] = -a * g
    m[1:4, 1:4] = rho_block
    m[4:7, 4:7] = h_block + a * np.outer(g, g)
    m[7, 7] = 1.0
    return m


def assemble_plasma_matrices(U: PlasmaState) -> tuple[np.ndarray, ...]:
    """``(A0, A1, A2, A3)`` of the symmetric MHD system in the unknown ``U``."""
    rho, rho_p, _ = eos_eval(U.q, U.H, U.S, U.eos)
    a = rho_p / rho
    A0 = _a0_blocks(rho * np.eye(3), a, np.eye(3), U.H)
    mats = [A0]
    for j in range(3):
        Aj = U.v[j] * A0 + e_matrix(1 + j)
        Aj[1:4, 4:7] -= U.H[j] * np.eye(3)
        Aj[4:7, 1:4] -= U.H[j] * np.eye(3)
        mats.append(Aj)
    return tuple(mats)


def _check_jacobian(d: FrontDerivs) -> None:
    if np.any(1.0 + np.asarray(d.x1) < 0.5):
        raise JacobianDegenerateError(f"1+Psi_1 = {1.0 + float(np.min(d.x1)):.6g}")


def assemble_Atilde1(U: PlasmaState, d: FrontDerivs) -> np.ndarray:
    """Normal coefficient ``(A1 - Psi_t A0 - Psi_2 A2 - Psi_3 A3)/(1+Psi_1)``."""
    _check_jacobian(d)
    A0, A1, A2, A3 = assemble_plasma_matrices(U)
    return (A1 - d.t * A0 - d.x2 * A2 - d.x3 * A3) / (1.0 + d.x1)


# ---------------------------------------------------------------------------
# Secondary (u, h) form


def r_hat(eta: np.ndarray) -> np.ndarray:
    R = np.eye(8)
    R[1:4, 1:4] = eta
    R[4:7, 4:7] = eta
    return R


@dataclass(frozen=True)
class SecondaryPlasma:
    """Coefficients of the secondary plasma system in ``(q, u, h, S)``.

    ``A[0]`` multiplies ``d_t``; ``A[j] + E[j]`` multiplies ``d_j``.
    """

    A: tuple
    E: tuple
    a0: np.ndarray
    w_hat: np.ndarray
    h_hat: np.ndarray

    def boundary_matrix(self) -> np.ndarray:
        return self.A[1] + self.E[1]


def hat_velocity_fields(U: PlasmaState, d: FrontDerivs):
    """``(u_hat, w_hat, h_hat)`` from a hat state and front derivatives."""
    eta = eta_matrix(d)
    u = eta @ U.v
    w = u - np.array([d.t, 0.0, 0.0])
    return u, w, eta @ U.H


def assemble_secondary_plasma(U: PlasmaState, d: FrontDerivs) -> SecondaryPlasma:
    """Secondary form by congruence with ``R_hat = diag(1, eta, eta, 1)``.

    ``A_j = (1+Psi_1) R^{-T} A^_j R^{-1} - E_{1,j+1}`` with ``A^_1`` the
    straightened normal matrix, so the total ``d_j`` coefficient stays symmetric
    and ``R^{-1}`` maps the new unknown back to ``U``.
    """
    _check_jacobian(d)
    eta = eta_matrix(d)
    try:
        Rinv = linalg.inverse(r_hat(eta))
    except SingularMatrixError as exc:  # pragma: no cover - gated above
        raise SingularMatrixError("eta_hat is singular") from exc
    A0, _, A2, A3 = assemble_plasma_matrices(U)
    hats = (A0, assemble_Atilde1(U, d), A2, A3)
    scale = 1.0 + d.x1
    A = []
    E = (np.zeros((8, 8)), e_matrix(1), e_matrix(2), e_matrix(3))
    for j, Aj in enumerate(hats):
        A.append(scale * Rinv.T @ Aj @ Rinv - E[j])
    einv = linalg.inverse(eta)
    _, w, h = hat_velocity_fields(U, d)
    return SecondaryPlasma(tuple(A), E, einv.T @ einv, w, h)


def secondary_closed_form(U: PlasmaState, d: FrontDerivs) -> tuple[np.ndarray, ...]:
    """Block formulas for the secondary matrices (independent of the congruence).

    With ``a = rho_p/rho``, ``a0 = eta^{-T} eta^{-1}`` and ``g = a0 h``:
    ``A0 = (1+Psi_1) S`` where ``S`` has blocks ``a``, ``rho a0``,
    ``a0 + a g g^T`` and coupling ``-a g``; ``A_j = w_j S - h_j C(a0)``
    where ``C`` couples ``u`` and ``h`` through ``a0``.
    """
    _check_jacobian(d)
    rho, rho_p, _ = eos_eval(U.q, U.H, U.S, U.eos)
    a = rho_p / rho
    eta = eta_matrix(d)
    einv = linalg.inverse(eta)
    a0 = einv.T @ einv
    _, w, h = hat_velocity_fields(U, d)
    g = a0 @ h
    S = _a0_blocks(rho * a0, a, a0, g)
    C = np.zeros((8, 8))
    C[1:4, 4:7] = C[4:7, 1:4] = a0
    out = [(1.0 + d.x1) * S]
    for j in range(3):
        out.append(w[j] * S - h[j] * C)
    return tuple(out)


# ---------------------------------------------------------------------------
# Linearisation helpers


def good_unknown(W, psi, psi1_hat, d1_W_hat):
    """``W - Psi/(1+Psi^_1) d_1 W^`` pointwise (arrays broadcast over grids)."""
    W = np.asarray(W, dtype=float)
    psi = np.asarray(psi, dtype=float)
    p1 = np.asarray(psi1_hat, dtype=float)
    dW = np.asarray(d1_W_hat, dtype=float)
    try:
        np.broadcast_shapes(W.shape, psi.shape, p1.shape, dW.shape)
    except ValueError as exc:
        raise GridError(f"grid mismatch in good_unknown: {exc}") from None
    if np.any(1.0 + p1 < 0.5):
        raise JacobianDegenerateError(f"1+Psi_1 = {1.0 + float(np.min(p1)):.6g}")
    return W - psi / (1.0 + p1) * dW


def _dA_dy(U: PlasmaState) -> list[list[np.ndarray]]:
    """``dA_alpha/dy_i`` for alpha = 0..3 and the 8 state components."""
    rho, rho_p, p = eos_eval(U.q, U.H, U.S, U.eos)
    g = U.eos.gamma_ad
    a = rho_p / rho
    H = U.H
    # derivatives of (rho, a) with respect to (q, H, S)
    drho = np.zeros(8)
    da = np.zeros(8)
    drho[0] = rho_p
    drho[4:7] = -rho_p * H
    drho[7] = -rho / g
    da[0] = -1.0 / (g * p * p)
    da[4:7] = H / (g * p * p)
    out = []
    A0 = _a0_blocks(rho * np.eye(3), a, np.eye(3), H)
    for i in range(8):
        dH = np.zeros(3)
        if 4 <= i <= 6:
            dH[i - 4] = 1.0
        dA0 = np.zeros((8, 8))
        dA0[0, 0] = da[i]
        cq = -(da[i] * H + a * dH)
        dA0[0, 4:7] = dA0[4:7, 0] = cq
        dA0[1:4, 1:4] = drho[i] * np.eye(3)
        dA0[4:7, 4:7] = da[i] * np.outer(H, H) + a * (np.outer(dH, H) + np.outer(H, dH))
        row = [dA0]
        for j in range(3):
            dv = 1.0 if i == 1 + j else 0.0
            dAj = U.v[j] * dA0 + dv * A0
            dAj[1:4, 4:7] -= dH[j] * np.eye(3)
            dAj[4:7, 1:4] -= dH[j] * np.eye(3)
            row.append(dAj)
        out.append(row)
    return out


def zero_order_C(U: PlasmaState, dU, d: FrontDerivs) -> np.ndarray:
    """Zero-order matrix ``C(U^, Psi^)`` of the linearised plasma operator.

    ``C Y = sum_alpha (Y . grad_y A_alpha) d_alpha U^`` with the straightened
    ``A~1`` in the normal direction.

    Args:
        dU: ``(4, 8)`` array of ``(d_t, d_1, d_2, d_3) U^``.
    """
    _check_jacobian(d)
    dU = np.asarray(dU, dtype=float).reshape(4, 8)
    dA = _dA_dy(U)
    C = np.zeros((8, 8))
    for i in range(8):
        dA0, dA1, dA2, dA3 = dA[i]
        dAt1 = (dA1 - d.t * dA0 - d.x2 * dA2 - d.x3 * dA3) / (1.0 + d.x1)
        C[:, i] = dA0 @ dU[0] + dAt1 @ dU[1] + dA2 @ dU[2] + dA3 @ dU[3]
    return C


def zero_order_C_fd(U: PlasmaState, dU, d: FrontDerivs, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference version of :func:`zero_order_C`."""
    dU = np.asarray(dU, dtype=float).reshape(4, 8)
    base = U.vector()

    def mats(vec):
        s = PlasmaState.from_vector(vec, U.eos)
        A0, _, A2, A3 = assemble_plasma_matrices(s)
        return A0, assemble_Atilde1(s, d), A2, A3

    C = np.zeros((8, 8))
    for i in range(8):
        e = np.zeros(8)
        e[i] = step
        plus, minus = mats(base + e), mats(base - e)
        for alpha in range(4):
            C[:, i] += (plus[alpha] - minus[alpha]) @ dU[alpha] / (2 * step)
    return C
