"""Maxwell blocks, the nu-family symmetrizer and its curved descendants.

Vacuum unknown ordering: ``W = (H1, H2, H3, E1, E2, E3)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import GridError, NuRangeError
from .geometry import FrontDerivs, bb_from_tilde, check_gates, frak_from_tilde, jacobians_at

NU_CLIP = 1.0 - 1e-6

_BP = (
    np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=float),
    np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=float),
    np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=float),
)


def b_prime(j: int) -> np.ndarray:
    """Cross-product generator ``B'_j`` (``j`` = 1, 2, 3)."""
    return _BP[j - 1].copy()


def assemble_B() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z = np.zeros((3, 3))
    return tuple(np.block([[z, b], [b.T, z]]) for b in _BP)


def assemble_Btilde1(d: FrontDerivs, eps: float) -> np.ndarray:
    """``(B1 - eps Psi_t I - Psi_2 B2 - Psi_3 B3)/(1+Psi_1)``."""
    check_gates(d, eps)
    B1, B2, B3 = assemble_B()
    return (B1 - eps * d.t * np.eye(6) - d.x2 * B2 - d.x3 * B3) / (1.0 + d.x1)


def btilde1_boundary_explicit(phi_t: float, phi_2: float, phi_3: float, eps: float) -> np.ndarray:
    """Explicit boundary form of the straightened Maxwell matrix (``Psi_1 = 0``)."""
    e = eps * phi_t
    return -np.array(
        [
            [e, 0, 0, 0, -phi_3, phi_2],
            [0, e, 0, phi_3, 0, 1],
            [0, 0, e, -phi_2, -1, 0],
            [0, phi_3, -phi_2, e, 0, 0],
            [-phi_3, 0, -1, 0, e, 0],
            [phi_2, 1, 0, 0, 0, e],
        ],
        dtype=float,
    )


# ---------------------------------------------------------------------------
# Secondary symmetrization


def validate_nu(nu) -> np.ndarray:
    n = np.asarray(nu, dtype=float).reshape(3)
    if not np.all(np.isfinite(n)) or float(np.linalg.norm(n)) >= 1.0:
        raise NuRangeError(f"|nu| = {float(np.linalg.norm(n)):.6g}")
    return n


def _frak_b(n1: float, n2: float, n3: float) -> tuple[np.ndarray, ...]:
    B0 = np.array(
        [
            [1, 0, 0, 0, n3, -n2],
            [0, 1, 0, -n3, 0, n1],
            [0, 0, 1, n2, -n1, 0],
            [0, -n3, n2, 1, 0, 0],
            [n3, 0, -n1, 0, 1, 0],
            [-n2, n1, 0, 0, 0, 1],
        ],
        dtype=float,
    )
    B1 = np.array(
        [
            [n1, n2, n3, 0, 0, 0],
            [n2, -n1, 0, 0, 0, -1],
            [n3, 0, -n1, 0, 1, 0],
            [0, 0, 0, n1, n2, n3],
            [0, 0, 1, n2, -n1, 0],
            [0, -1, 0, n3, 0, -n1],
        ],
        dtype=float,
    )
    B2 = np.array(
        [
            [-n2, n1, 0, 0, 0, 1],
            [n1, n2, n3, 0, 0, 0],
            [0, n3, -n2, -1, 0, 0],
            [0, 0, -1, -n2, n1, 0],
            [0, 0, 0, n1, n2, n3],
            [1, 0, 0, 0, n3, -n2],
        ],
        dtype=float,
    )
    B3 = np.array(
        [
            [-n3, 0, n1, 0, -1, 0],
            [0, -n3, n2, 1, 0, 0],
            [n1, n2, n3, 0, 0, 0],
            [0, 1, 0, -n3, 0, n1],
            [-1, 0, 0, 0, -n3, n2],
            [0, 0, 0, n1, n2, n3],
        ],
        dtype=float,
    )
    return B0, B1, B2, B3


@dataclass(frozen=True)
class SymmetrizerFamily:
    nu: np.ndarray
    B: tuple
    R1: np.ndarray
    R2: np.ndarray


def assemble_secondary(nu) -> SymmetrizerFamily:
    """The nu-parameterized symmetrizer ``(B0, ..., B3)`` with ``R1, R2``.

    Raises:
        NuRangeError: ``|nu| >= 1``.
    """
    n = validate_nu(nu)
    return SymmetrizerFamily(n, _frak_b(*n), np.r_[n, 0, 0, 0], np.r_[0, 0, 0, n])


def augmentation_rhs(fam: SymmetrizerFamily, j: int) -> np.ndarray:
    """``B0 B_j + R1 e_j^T + R2 e_{j+3}^T`` for ``j`` = 1, 2, 3.

    This is the coefficient of ``d_j W`` once the divergence terms
    ``R1 div H + R2 div E`` are added to ``B0 (eps d_t W + sum B_j d_j W)``.
    """
    Bj = assemble_B()[j - 1]
    ej = np.zeros(6)
    ej[j - 1] = 1.0
    ej3 = np.zeros(6)
    ej3[j + 2] = 1.0
    return fam.B[0] @ Bj + np.outer(fam.R1, ej) + np.outer(fam.R2, ej3)


def positivity_frak_B0(nu) -> float:
    """Smallest eigenvalue of ``B0(nu)``; valid for any ``nu``."""
    n = np.asarray(nu, dtype=float).reshape(3)
    return float(linalg.sym_eigvals(_frak_b(*n)[0])[0])


def frak_b0_spectrum(nu) -> np.ndarray:
    """Closed-form spectrum ``{1-|nu| (x2), 1 (x2), 1+|nu| (x2)}``, ascending."""
    r = float(np.linalg.norm(nu))
    return np.array([1 - r, 1 - r, 1.0, 1.0, 1 + r, 1 + r])


def frak_btilde1(fam: SymmetrizerFamily, d: FrontDerivs, eps: float) -> np.ndarray:
    B0, B1, B2, B3 = fam.B
    return (B1 - eps * d.t * B0 - d.x2 * B2 - d.x3 * B3) / (1.0 + d.x1)


def det_frak_B1_flat(nu) -> float:
    n = np.asarray(nu, dtype=float)
    return float(n[0] ** 2 * (n @ n - 1.0) ** 2)


def det_frak_B1_curved(nu, d: FrontDerivs, eps: float) -> tuple[float, float]:
    """Closed-form and direct determinant of the curved normal symmetrizer.

    The direct value is ``det((1+Psi_1) B~1)``, the matrix
    ``B1 - eps Psi_t B0 - Psi_2 B2 - Psi_3 B3``.
    """
    fam = assemble_secondary(nu)
    check_gates(d, eps)
    n = fam.nu
    n2 = 1.0 + d.x2**2 + d.x3**2
    et2 = (eps * d.t) ** 2
    formula = (n2 - et2) ** 2 * (n[0] - n[1] * d.x2 - n[2] * d.x3 - eps * d.t) ** 2 * (n @ n - 1) ** 2
    direct = linalg.det((1.0 + d.x1) * frak_btilde1(fam, d, eps))
    return float(formula), float(direct)


# ---------------------------------------------------------------------------
# Curved symmetrization


@dataclass(frozen=True)
class MFamily:
    M: tuple
    Mg: tuple


def assemble_M(nu, d: FrontDerivs, eps: float) -> MFamily:
    """``M_j = J1^T B_j J1 / ((1+Psi_1)(1-eps^2 Psi_t^2)^2)`` and the ``K``-form.

    ``M_1`` and ``M^g_1`` use the straightened ``B~1``.

    Raises:
        InvertibilityError, JacobianDegenerateError: gate failures.
        NuRangeError: ``|nu| >= 1``.
    """
    fam = assemble_secondary(nu)
    pack = jacobians_at(d, eps)
    a = 1.0 + d.x1
    scale = a * (1.0 - (eps * d.t) ** 2) ** 2
    mats = list(fam.B)
    mats[1] = frak_btilde1(fam, d, eps)
    M = tuple(pack.J1.T @ B @ pack.J1 / scale for B in mats)
    Mg = tuple(pack.K @ B @ pack.K.T / a for B in mats)
    return MFamily(M, Mg)


def m1_block_form(nu, d: FrontDerivs, eps: float) -> np.ndarray:
    """``M_1`` rebuilt from its ``S``/``T`` block description.

    The block description is exact only where ``Psi_1 = 0`` (the boundary);
    other points are rejected.
    """
    n = validate_nu(nu)
    check_gates(d, eps)
    if d.x1 != 0.0:
        raise ValueError("the S/T block form of M_1 holds only where Psi_1 = 0")
    a = 1.0 + d.x1
    c = 1.0 + d.x2**2 + d.x3**2 - (eps * d.t) ** 2
    s11 = (n[0] - n[1] * d.x2 - n[2] * d.x3 - eps * d.t) * c / a**2
    cross = -(n[1] * d.x3 + n[2] * d.x2)
    S = np.array(
        [
            [s11, n[1] * c / a, n[2] * c / a],
            [n[1] * c / a, -n[0] - n[1] * d.x2 + n[2] * d.x3 + eps * d.t, cross],
            [n[2] * c / a, cross, -n[0] + n[1] * d.x2 - n[2] * d.x3 + eps * d.t],
        ]
    )
    T = (1.0 - eps * n[0] * d.t) * _BP[0]
    return np.block([[S, T], [-T, S]]) / (a * (1.0 - (eps * d.t) ** 2))


def boundary_nu1(nu2: float, nu3: float, phi_t: float, phi_2: float, phi_3: float, eps: float) -> float:
    """Normal component of nu making the boundary characteristic."""
    return nu2 * phi_2 + nu3 * phi_3 + eps * phi_t


def m1_boundary_blocks(nu2, nu3, phi_t, phi_2, phi_3, eps) -> tuple[np.ndarray, np.ndarray]:
    """``(S, T)`` on the boundary, where the ``(1,1)`` entry of ``S`` vanishes."""
    c = 1.0 + phi_2**2 + phi_3**2 - (eps * phi_t) ** 2
    cross = -(nu2 * phi_3 + nu3 * phi_2)
    S = np.array(
        [
            [0.0, nu2 * c, nu3 * c],
            [nu2 * c, -2 * nu2 * phi_2, cross],
            [nu3 * c, cross, -2 * nu3 * phi_3],
        ]
    )
    T = (1.0 - (eps * phi_t) ** 2 - eps * nu2 * phi_t * phi_2 - eps * nu3 * phi_t * phi_3) * _BP[0]
    return S, T


# ---------------------------------------------------------------------------
# B0 = K J^{-1}


def assemble_B0(d: FrontDerivs, eps: float) -> np.ndarray:
    pack = jacobians_at(d, eps)
    return pack.K @ linalg.inverse(pack.J)


def _k_dot(dd: FrontDerivs) -> np.ndarray:
    """Time derivative of ``K`` given ``(Psi_tt, Psi_1t, Psi_2t, Psi_3t)``."""
    ed = np.array([[0.0, -dd.x2, -dd.x3], [0.0, dd.x1, 0.0], [0.0, 0.0, dd.x1]])
    z = np.zeros((3, 3))
    return np.block([[ed, z], [z, ed]])


def _j_dot(dd: FrontDerivs, eps: float) -> np.ndarray:
    e = eps * dd.t
    return np.array(
        [
            [dd.x1, 0, 0, 0, 0, 0],
            [dd.x2, 0, 0, 0, 0, e],
            [dd.x3, 0, 0, 0, -e, 0],
            [0, 0, 0, dd.x1, 0, 0],
            [0, 0, -e, dd.x2, 0, 0],
            [0, e, 0, dd.x3, 0, 0],
        ],
        dtype=float,
    )


def assemble_B0_B4(d: FrontDerivs, d_dt: FrontDerivs, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """``B0 = K J^{-1}`` and ``B4 = d_t B0 = (K' - B0 J') J^{-1}``.

    Args:
        d: ``(Psi_t, Psi_1, Psi_2, Psi_3)`` at the point.
        d_dt: their time derivatives ``(Psi_tt, Psi_1t, Psi_2t, Psi_3t)``.
    """
    pack = jacobians_at(d, eps)
    Jinv = linalg.inverse(pack.J)
    B0 = pack.K @ Jinv
    B4 = (_k_dot(d_dt) - B0 @ _j_dot(d_dt, eps)) @ Jinv
    return B0, B4


def b4_finite_difference(derivs_at, t: float, eps: float, step: float = 1e-6) -> np.ndarray:
    """Central difference of ``B0`` along a time-parameterized derivative path."""
    plus = assemble_B0(derivs_at(t + step), eps)
    minus = assemble_B0(derivs_at(t - step), eps)
    return (plus - minus) / (2.0 * step)


def b0_cubic(d: FrontDerivs, eps: float) -> np.ndarray:
    """Ascending coefficients of the cubic whose square is the characteristic
    polynomial of ``(1+Psi_1)(1-eps^2 Psi_t^2) B0``."""
    n2 = 1.0 + d.x2**2 + d.x3**2
    a2 = (1.0 + d.x1) ** 2
    e2 = (eps * d.t) ** 2
    return np.array(
        [
            -(a2**2) * (1 - e2) ** 2,
            a2 * (1 - e2) * (n2 + a2 + 1),
            -(n2 + 2 * a2 - e2),
            1.0,
        ]
    )


def b0_scale(d: FrontDerivs, eps: float) -> float:
    return (1.0 + d.x1) * (1.0 - (eps * d.t) ** 2)


# ---------------------------------------------------------------------------
# Boundary quadratic form


def quadratic_form_M1(W_bb, nu2: float, nu3: float, phi_t: float, phi_2: float, phi_3: float, eps: float):
    """``(closed, direct)`` values of ``(M1 W, W)/2`` on the boundary.

    ``nu1`` is fixed by :func:`boundary_nu1`; ``h1``, ``e1`` come from
    ``w = K J^{-1} W``.
    """
    W = np.asarray(W_bb, dtype=float).reshape(6)
    d = FrontDerivs(phi_t, 0.0, phi_2, phi_3)
    nu = np.array([boundary_nu1(nu2, nu3, phi_t, phi_2, phi_3, eps), nu2, nu3])
    M1 = assemble_M(nu, d, eps).M[1]
    pack = jacobians_at(d, eps)
    w = pack.K @ linalg.solve(pack.J, W)
    Hs, Es = W[:3], W[3:]
    closed = (
        Hs[2] * Es[1]
        - Hs[1] * Es[2]
        + nu2 * (Hs[1] * w[0] + Es[1] * w[3])
        + nu3 * (Hs[2] * w[0] + Es[2] * w[3])
    )
    return float(closed), float(0.5 * W @ M1 @ W)


# ---------------------------------------------------------------------------
# nu extension off the boundary


def zeta(x1):
    """Cut-off in the vacuum: 1 at ``x1 = 0``, 0 for ``x1 <= -1``."""
    from .geometry import _smoothstep5

    return _smoothstep5(np.asarray(x1, dtype=float) + 1.0)


def extend_nu(v_hat_boundary, eps: float, x1):
    """``nu(x1) = eps v_hat zeta(x1)`` clipped to ``|nu| <= 1 - 1e-6``.

    Returns an array of shape ``(3, len(x1))``.
    """
    v = np.asarray(v_hat_boundary, dtype=float).reshape(3, 1)
    nu = eps * v * zeta(x1)[None, :]
    r = np.linalg.norm(nu, axis=0)
    fac = np.where(r > NU_CLIP, NU_CLIP / np.maximum(r, 1e-300), 1.0)
    return nu * fac


# ---------------------------------------------------------------------------
# Field residuals


@dataclass(frozen=True)
class FieldGrid:
    """Uniform grid with axes ``(t, x1, x2)``; x2 periodic, x3-invariant."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray

    @property
    def spacing(self):
        return (
            float(self.t[1] - self.t[0]) if self.t.size > 1 else 1.0,
            float(self.x1[1] - self.x1[0]),
            float(self.x2[1] - self.x2[0]),
        )


def _diff(F, h, axis, periodic):
    if periodic:
        return (np.roll(F, -1, axis=axis) - np.roll(F, 1, axis=axis)) / (2 * h)
    out = np.full_like(F, np.nan)
    sl_c = [slice(None)] * F.ndim
    sl_p = [slice(None)] * F.ndim
    sl_m = [slice(None)] * F.ndim
    sl_c[axis] = slice(1, -1)
    sl_p[axis] = slice(2, None)
    sl_m[axis] = slice(0, -2)
    out[tuple(sl_c)] = (F[tuple(sl_p)] - F[tuple(sl_m)]) / (2 * h)
    return out


def maxwell_pieces(w_tilde, derivs: FrontDerivs, eps: float, grid: FieldGrid):
    """Families and their discrete derivatives for an x3-invariant field.

    ``w_tilde`` has shape ``(6, nt, n1, n2)``.  Returns a dict with the
    fixed-domain operators ``m1 = eps d_t h + curl E*``,
    ``m2 = eps d_t e - curl H*`` and ``div h``, ``div e`` (NaN on the
    outermost t and x1 layers).
    """
    w = np.asarray(w_tilde, dtype=float)
    if w.shape[0] != 6 or w.ndim != 4:
        raise GridError("expected a (6, nt, n1, n2) field")
    dt, h1, h2 = grid.spacing
    frak = frak_from_tilde(w, derivs)
    bb = bb_from_tilde(w, derivs, eps)
    fh, fe = frak[:3], frak[3:]
    Hs, Es = bb[:3], bb[3:]

    def d(F, ax):
        # ax: 1 = t, 2 = x1, 3 = x2, counted on the grid axes of F
        return _diff(F, (dt, h1, h2)[ax - 1], F.ndim - 4 + ax, ax == 3)

    curl_E = np.stack([d(Es[2], 3), -d(Es[2], 2), d(Es[1], 2) - d(Es[0], 3)])
    curl_H = np.stack([d(Hs[2], 3), -d(Hs[2], 2), d(Hs[1], 2) - d(Hs[0], 3)])
    m1 = eps * d(fh, 1) + curl_E
    m2 = eps * d(fe, 1) - curl_H
    div_h = d(fh[0], 2) + d(fh[1], 3)
    div_e = d(fe[0], 2) + d(fe[1], 3)
    return {"m1": m1, "m2": m2, "div_h": div_h, "div_e": div_e, "frak": frak, "bb": bb}


def _eta_apply(derivs: FrontDerivs, v):
    """``eta v`` for stacked 3-vectors."""
    return np.stack([v[0] - derivs.x2 * v[1] - derivs.x3 * v[2], (1 + derivs.x1) * v[1], (1 + derivs.x1) * v[2]])


def _eta_inv_apply(derivs: FrontDerivs, v):
    a = 1.0 + derivs.x1
    v2, v3 = v[1] / a, v[2] / a
    return np.stack([v[0] + derivs.x2 * v2 + derivs.x3 * v3, v2, v3])


def secsym_residual(w_tilde, nu, derivs: FrontDerivs, eps: float, grid: FieldGrid) -> dict:
    """Residual of the nu-augmented Maxwell combination on the fixed domain.

    Args:
        w_tilde: pulled-back field ``(6, nt, n1, n2)``.
        nu: ``(3, ...)`` broadcastable to the grid, ``|nu| < 1``.
        derivs: ``Psi^`` derivatives broadcastable to ``(nt, n1, n2)``.

    Returns:
        dict with ``secsym`` (6-vector field), ``plain`` (the unaugmented
        operator) and ``div`` residual fields, NaN on the stencil rim.
    """
    nu = np.asarray(nu, dtype=float)
    if np.any(np.linalg.norm(nu.reshape(3, -1), axis=0) >= 1.0):
        raise NuRangeError("nu field leaves the unit ball")
    p = maxwell_pieces(w_tilde, derivs, eps, grid)
    m1, m2 = p["m1"], p["m2"]
    a = 1.0 + derivs.x1
    enu = _eta_apply(derivs, np.broadcast_to(nu, m1.shape)) / a
    r1 = m1 - _eta_apply(derivs, np.cross(nu, _eta_inv_apply(derivs, m2), axis=0)) + enu * p["div_h"]
    r2 = m2 + _eta_apply(derivs, np.cross(nu, _eta_inv_apply(derivs, m1), axis=0)) + enu * p["div_e"]
    return {
        "secsym": np.concatenate([r1, r2]),
        "plain": np.concatenate([m1, m2]),
        "div": np.stack([p["div_h"], p["div_e"]]),
    }


def interior_max(field) -> float:
    f = np.asarray(field)
    return float(np.nanmax(np.abs(f))) if np.any(np.isfinite(f)) else 0.0


def order_fit(hs, errs) -> float:
    """Least-squares slope of ``log err`` against ``log h``."""
    hs = np.log(np.asarray(hs, dtype=float))
    es = np.log(np.maximum(np.asarray(errs, dtype=float), 1e-300))
    return float(np.polyfit(hs, es, 1)[0])

