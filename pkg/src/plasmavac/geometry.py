"""Front lifting, Jacobian algebra and variable changes on the fixed domain.

The interface ``x1 = phi(t, x')`` is lifted to a diffeomorphism
``Phi(t, x) = (x1 + Psi(t, x), x')`` with ``Psi = chi(x1 <D>) phi``.  On the
fixed domain the vacuum unknowns are re-expressed through the matrices
``eta``, ``K``, ``J``, ``J1`` and ``L`` assembled in :func:`jacobians_at`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import GridError, InvertibilityError, JacobianDegenerateError

CHI_TAG = "quintic-smoothstep chi: 1 on |s|<=1, 0 on |s|>=2"
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class FrontDerivs(NamedTuple):
    """First derivatives ``(Psi_t, Psi_1, Psi_2, Psi_3)`` at a point (or arrays)."""

    t: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0


def _smoothstep5(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


def _smoothstep5_prime(x):
    inside = (x > 0.0) & (x < 1.0)
    xc = np.clip(x, 0.0, 1.0)
    return np.where(inside, 30.0 * xc * xc * (1.0 - xc) ** 2, 0.0)


def chi(s):
    """Cut-off profile: 1 for ``|s| <= 1``, 0 for ``|s| >= 2``, C^2 in between."""
    a = np.abs(np.asarray(s, dtype=float))
    return 1.0 - _smoothstep5(a - 1.0)


def chi_prime(s):
    s = np.asarray(s, dtype=float)
    return -np.sign(s) * _smoothstep5_prime(np.abs(s) - 1.0)


# ---------------------------------------------------------------------------
# Jacobian pack


def check_gates(d: FrontDerivs, eps: float) -> None:
    """Raise the specific gate error if either invertibility condition fails."""
    one_p = 1.0 + np.asarray(d.x1, dtype=float)
    if np.any(one_p < 0.5):
        raise JacobianDegenerateError(f"min 1+Psi_1 = {float(np.min(one_p)):.6g}")
    et = eps * np.abs(np.asarray(d.t, dtype=float))
    if np.any(et >= 1.0):
        raise InvertibilityError(f"max epsilon*|Psi_t| = {float(np.max(et)):.6g}")


def eta_matrix(d: FrontDerivs) -> np.ndarray:
    return np.array(
        [[1.0, -d.x2, -d.x3], [0.0, 1.0 + d.x1, 0.0], [0.0, 0.0, 1.0 + d.x1]]
    )


def j_matrix(d: FrontDerivs, eps: float) -> np.ndarray:
    a = 1.0 + d.x1
    e = eps * d.t
    return np.array(
        [
            [a, 0, 0, 0, 0, 0],
            [d.x2, 1, 0, 0, 0, e],
            [d.x3, 0, 1, 0, -e, 0],
            [0, 0, 0, a, 0, 0],
            [0, 0, -e, d.x2, 1, 0],
            [0, e, 0, d.x3, 0, 1],
        ],
        dtype=float,
    )


def j1_explicit(d: FrontDerivs, eps: float) -> np.ndarray:
    """Closed form of ``(1+Psi_1)(1-eps^2 Psi_t^2) J^{-1}``."""
    a = 1.0 + d.x1
    e = eps * d.t
    p2, p3 = d.x2, d.x3
    return np.array(
        [
            [1 - e * e, 0, 0, 0, 0, 0],
            [-p2, a, 0, e * p3, 0, -a * e],
            [-p3, 0, a, -e * p2, a * e, 0],
            [0, 0, 0, 1 - e * e, 0, 0],
            [-e * p3, 0, a * e, -p2, a, 0],
            [e * p2, -a * e, 0, -p3, 0, a],
        ],
        dtype=float,
    )


@dataclass(frozen=True)
class JacobianPack:
    """Transform matrices at one point of the fixed domain."""

    derivs: FrontDerivs
    eps: float
    eta: np.ndarray
    K: np.ndarray
    J: np.ndarray
    J1: np.ndarray
    L: np.ndarray
    N: np.ndarray
    detJ: float

    @property
    def one_plus_psi1(self) -> float:
        return 1.0 + self.derivs.x1


def jacobians_at(d: FrontDerivs, eps: float, debug: bool = False) -> JacobianPack:
    """Assemble ``eta, K, J, J1, L, N`` and ``det J`` from first derivatives of Psi.

    Raises:
        JacobianDegenerateError: ``1 + Psi_1 < 1/2``.
        InvertibilityError: ``eps |Psi_t| >= 1``.
    """
    d = FrontDerivs(*(float(x) for x in d))
    check_gates(d, eps)
    eta = eta_matrix(d)
    z = np.zeros((3, 3))
    K = np.block([[eta, z], [z, eta]])
    J = j_matrix(d, eps)
    J1 = j1_explicit(d, eps)
    a = 1.0 + d.x1
    L = J @ K.T / a
    det_j = a * a * (1.0 - (eps * d.t) ** 2) ** 2
    pack = JacobianPack(d, eps, eta, K, J, J1, L, np.array([1.0, -d.x2, -d.x3]), det_j)
    if debug:
        scale = a * (1.0 - (eps * d.t) ** 2)
        assert np.allclose(J1 @ J, scale * np.eye(6), atol=1e-12)
        assert abs(linalg.det(J) - det_j) <= 1e-12 * max(1.0, det_j)
    return pack


@dataclass(frozen=True)
class TransformedFields:
    """``w = K W~`` (gothic), ``W_g = (1+Psi_1) K^{-T} W~`` and ``WW = J W~``."""

    w_frak: np.ndarray
    w_g: np.ndarray
    w_bb: np.ndarray


def transform_fields(w_tilde, pack: JacobianPack) -> TransformedFields:
    """Map the pulled-back vacuum field to the three fixed-domain families.

    ``w_tilde`` may carry trailing grid axes; the first axis has length 6.
    """
    w = np.asarray(w_tilde, dtype=float)
    if w.shape[0] != 6:
        raise GridError(f"vacuum field needs 6 components, got {w.shape[0]}")
    a = pack.one_plus_psi1
    flat = w.reshape(6, -1)
    w_frak = pack.K @ flat
    w_g = a * linalg.solve(pack.K.T, flat)
    w_bb = pack.J @ flat
    shape = w.shape
    return TransformedFields(w_frak.reshape(shape), w_g.reshape(shape), w_bb.reshape(shape))


def inverse_transform(w_bb, pack: JacobianPack) -> np.ndarray:
    """Recover ``W~`` from ``WW = J W~``."""
    w = np.asarray(w_bb, dtype=float)
    return linalg.solve(pack.J, w.reshape(6, -1)).reshape(w.shape)


# ---------------------------------------------------------------------------
# Pointwise (vectorised) field families, used by the residual checks


def frak_from_tilde(w_tilde: np.ndarray, d: FrontDerivs) -> np.ndarray:
    """``(h, e) = (eta H~, eta E~)`` for arrays of shape ``(6, ...)``."""
    out = np.empty_like(w_tilde)
    for off in (0, 3):
        f1, f2, f3 = w_tilde[off], w_tilde[off + 1], w_tilde[off + 2]
        out[off] = f1 - d.x2 * f2 - d.x3 * f3
        out[off + 1] = (1.0 + d.x1) * f2
        out[off + 2] = (1.0 + d.x1) * f3
    return out


def bb_from_tilde(w_tilde: np.ndarray, d: FrontDerivs, eps: float) -> np.ndarray:
    """``(HH, EE) = J W~`` for arrays of shape ``(6, ...)``."""
    h1, h2, h3, e1, e2, e3 = w_tilde
    a = 1.0 + d.x1
    e = eps * d.t
    return np.stack(
        [
            a * h1,
            h2 + d.x2 * h1 + e * e3,
            h3 + d.x3 * h1 - e * e2,
            a * e1,
            e2 + d.x2 * e1 - e * h3,
            e3 + d.x3 * e1 + e * h2,
        ]
    )


# ---------------------------------------------------------------------------
# Lifting on the periodic torus


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def torus_wavenumbers(n2: int, n3: int, length: float = 2.0 * math.pi):
    k2 = np.fft.fftfreq(n2, d=length / (2.0 * math.pi * n2))
    k3 = np.fft.fftfreq(n3, d=length / (2.0 * math.pi * n3))
    return np.meshgrid(k2, k3, indexing="ij")


@dataclass(frozen=True)
class FrontLift:
    """Lift ``Psi`` of a front, with its spatial first derivatives.

    Arrays have shape ``(..., n1, n2, n3)``; leading axes follow ``phi``.
    """

    x1: np.ndarray
    psi: np.ndarray
    psi_1: np.ndarray
    psi_2: np.ndarray
    psi_3: np.ndarray
    chi_tag: str = CHI_TAG

    def trace(self) -> np.ndarray:
        i0 = int(np.argmin(np.abs(self.x1)))
        return self.psi[..., i0, :, :]


def lift_front(phi, x1, chi_profile=chi, chi_profile_prime=chi_prime) -> FrontLift:
    """Lift a periodic front ``phi(x2, x3)`` to ``Psi(x1, x2, x3)``.

    Each Fourier mode ``xi`` of ``phi`` is multiplied by ``chi(x1 <xi>)`` with
    ``<xi> = sqrt(1 + |xi|^2)``; ``d/dx1`` is taken analytically through
    ``chi'``, tangential derivatives spectrally.

    Args:
        phi: array ``(..., n2, n3)`` on ``[0, 2pi)^2``; ``n2, n3`` powers of two.
        x1: 1-D array of normal coordinates.
    """
    p = np.asarray(phi, dtype=float)
    if p.ndim < 2:
        raise GridError("phi must have at least two (x2, x3) axes")
    n2, n3 = p.shape[-2:]
    if not (_is_pow2(n2) and _is_pow2(n3)):
        raise GridError(f"front grid {n2}x{n3} is not a power of two")
    if not np.all(np.isfinite(p)):
        raise GridError("front contains NaN or Inf")
    x1 = np.asarray(x1, dtype=float)
    k2, k3 = torus_wavenumbers(n2, n3)
    bracket = np.sqrt(1.0 + k2 * k2 + k3 * k3)
    ph = np.fft.fft2(p, axes=(-2, -1))
    arg = x1[:, None, None] * bracket[None]
    mult = chi_profile(arg)
    mult1 = chi_profile_prime(arg) * bracket[None]
    ph = ph[..., None, :, :]

    def back(coef):
        return np.real(np.fft.ifft2(coef, axes=(-2, -1)))

    return FrontLift(
        x1=x1,
        psi=back(ph * mult),
        psi_1=back(ph * mult1),
        psi_2=back(ph * mult * (1j * k2)),
        psi_3=back(ph * mult * (1j * k3)),
    )


def torus_sobolev_norm(u, s: float, gamma: float = 1.0, length: float = 2.0 * math.pi) -> np.ndarray:
    """``||u||_{H^s_gamma}`` on the 2-torus of side ``length`` (last two axes).

    Normalised as ``V * sum (gamma^2 + |xi|^2)^s |c_xi|^2`` with Fourier
    coefficients ``c`` and torus area ``V``, the periodic analogue of the
    Plancherel-weighted norm on the plane.
    """
    a = np.asarray(u, dtype=float)
    n2, n3 = a.shape[-2:]
    k2, k3 = torus_wavenumbers(n2, n3, length)
    c = np.fft.fft2(a, axes=(-2, -1)) / (n2 * n3)
    weight = (gamma * gamma + k2 * k2 + k3 * k3) ** s
    return np.sqrt(length * length * np.sum(weight * np.abs(c) ** 2, axis=(-2, -1)))


def verify_lift_estimates(phi, x1, phi_t=None, times=None) -> dict:
    """Measure the lifting bounds on a sampled front.

    Checks the trace property ``Psi(x1=0) = phi``, the slope bound
    ``sup|Psi_1| <= 1/2`` (meaningful when ``sup_t ||phi||_{H^2} <= 1``) and
    ``sup|d_t^j Psi| <= ||d_t^j phi||_{H^{3/2}} / sqrt(2 pi)`` for ``j = 0, 1``.

    Args:
        phi: ``(nt, n2, n3)`` samples (a single ``(n2, n3)`` slice is accepted).
        x1: normal grid containing ``0``.
        phi_t: optional time derivative samples; otherwise differenced from
            ``phi`` using ``times``.
    """
    p = np.asarray(phi, dtype=float)
    if p.ndim == 2:
        p = p[None]
    if phi_t is None and times is not None and p.shape[0] >= 3:
        phi_t = np.gradient(p, np.asarray(times, dtype=float), axis=0, edge_order=2)
    lift = lift_front(p, x1)
    scale = float(np.max(np.abs(p))) if p.size else 0.0
    trace_err = float(np.max(np.abs(lift.trace() - p))) if 0.0 in np.asarray(x1) else float("nan")
    h2 = torus_sobolev_norm(p, 2.0)
    report: dict = {
        "chi": CHI_TAG,
        "trace_error": trace_err,
        "trace_pass": bool(trace_err <= 1e-12 * max(scale, 1e-300) or trace_err == 0.0),
        "sup_H2_norm_phi": float(np.max(h2)),
        "sup_abs_psi_1": float(np.max(np.abs(lift.psi_1))),
    }
    report["slope_bound_applies"] = report["sup_H2_norm_phi"] <= 1.0 + 1e-12
    report["slope_pass"] = bool(
        (not report["slope_bound_applies"]) or report["sup_abs_psi_1"] <= 0.5 + 1e-10
    )
    derivs = [("j0", p, lift)]
    if phi_t is not None:
        pt = np.asarray(phi_t, dtype=float).reshape(p.shape)
        derivs.append(("j1", pt, lift_front(pt, x1)))
    ok = report["trace_pass"] and report["slope_pass"]
    for name, field, lf in derivs:
        sup = float(np.max(np.abs(lf.psi)))
        bound = float(np.max(INV_SQRT_2PI * torus_sobolev_norm(field, 1.5)))
        ratio = sup / max(bound * math.sqrt(2 * math.pi), 1e-300) if bound > 0 else 0.0
        passed = sup <= bound * (1 + 1e-12) + 1e-300 or sup == 0.0
        report[f"{name}_sup_psi"] = sup
        report[f"{name}_bound"] = bound
        report[f"{name}_ratio"] = ratio
        report[f"{name}_pass"] = bool(passed)
        ok = ok and passed
    report["pass"] = bool(ok)
    return report


# ---------------------------------------------------------------------------
# Chain rule on grids


def central_diff(f: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    """Second-order central difference.

    Periodic axes wrap around; otherwise the two end slices are dropped, so
    the result is two shorter along ``axis``.
    """
    if periodic:
        return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)
    n = f.shape[axis]
    if n < 3:
        raise GridError("central difference needs at least three points")
    fwd = np.take(f, np.arange(2, n), axis=axis)
    bwd = np.take(f, np.arange(0, n - 2), axis=axis)
    return (fwd - bwd) / (2.0 * h)


def pullback_derivative(f_tilde, j: int, derivs: FrontDerivs, spacing, periodic=None):
    """Physical derivative ``(d_j f) o Phi`` from a pulled-back grid function.

    ``f~(x) = f(Phi(x))`` is differenced on the fixed grid and corrected by
    ``d_1 f = f~_1 / (1+Psi_1)`` and ``d_j f = f~_j - Psi_j f~_1 / (1+Psi_1)``.

    Args:
        f_tilde: array with axes ``(t, x1, x2)``; time may have length 1 when
            ``j != 0``.
        j: 0 (time), 1, 2 or 3 (x3-invariant fields give 0 for ``j = 3``).
        derivs: ``Psi`` derivatives on the same grid.
        spacing: ``(dt, h1, h2)``.
        periodic: per-axis periodicity; default ``(False, False, True)``.

    Returns:
        Values on the interior of every non-periodic axis that is differenced.

    Raises:
        GridError: an axis is too short for the stencil.
    """
    periodic = (False, False, True) if periodic is None else tuple(periodic)
    f = np.asarray(f_tilde, dtype=float)
    if f.ndim != 3:
        raise GridError("pullback_derivative expects (t, x1, x2) arrays")

    def trim(a, axes):
        sl = [slice(None)] * 3
        for ax in axes:
            if not periodic[ax]:
                sl[ax] = slice(1, -1)
        return a[tuple(sl)]

    axes = [1] if j in (1, 3) else [0, 1] if j == 0 else [1, 2]
    if j == 3:
        return np.zeros_like(trim(f, axes))
    f1 = central_diff(f, spacing[1], 1, periodic[1])
    f1 = trim(f1, [ax for ax in axes if ax != 1])
    p1 = trim(np.broadcast_to(derivs.x1, f.shape), axes)
    if j == 1:
        return f1 / (1.0 + p1)
    pj = derivs.t if j == 0 else derivs.x2
    fj = central_diff(f, spacing[j], j, periodic[j])
    fj = trim(fj, [ax for ax in axes if ax != j])
    pj = trim(np.broadcast_to(pj, f.shape), axes)
    return fj - pj * f1 / (1.0 + p1)


# ---------------------------------------------------------------------------
# Manufactured Maxwell checks on the fixed domain


@dataclass(frozen=True)
class PlaneWave:
    """Exact x3-invariant vacuum wave ``E = a cos(k.x - w t)``, ``H = (k/|k| x a) cos(...)``.

    ``a`` must be orthogonal to ``k``; ``w = |k| / eps``.
    """

    k: tuple = (1.0, 1.0, 0.0)
    a: tuple = (1.0, -1.0, 0.5)
    eps: float = 0.5

    def __call__(self, t, x1, x2):
        k = np.asarray(self.k, dtype=float)
        a = np.asarray(self.a, dtype=float)
        if abs(k @ a) > 1e-12 * np.linalg.norm(k) * np.linalg.norm(a):
            raise ValueError("polarisation must be orthogonal to the wave vector")
        kn = np.linalg.norm(k)
        b = np.cross(k / kn, a)
        phase = np.cos(k[0] * x1 + k[1] * x2 - kn / self.eps * t)
        return np.concatenate([b[:, None] * phase.ravel()[None], a[:, None] * phase.ravel()[None]]).reshape(
            (6,) + np.shape(phase)
        )


@dataclass(frozen=True)
class AnalyticFront:
    """``Psi = A exp(-x1^2) cos(x2 - c t)`` with its first derivatives."""

    amp: float = 0.1
    speed: float = 1.0

    def __call__(self, t, x1, x2):
        g = np.exp(-x1 * x1)
        arg = x2 - self.speed * t
        psi = self.amp * g * np.cos(arg)
        return (
            psi,
            FrontDerivs(
                t=self.amp * self.speed * g * np.sin(arg),
                x1=-2.0 * x1 * psi,
                x2=-self.amp * g * np.sin(arg),
                x3=np.zeros_like(psi),
            ),
        )


def maxwell_transform_residual(field, psi, eps: float, n: int, nu=(0.3, 0.2, 0.1), t0: float = 0.3,
                               x1_range=(-1.0, 0.0)) -> dict:
    """Pull an exact Maxwell solution back by ``Psi`` and measure discrete residuals.

    The field is sampled at ``(t, x1 + Psi, x2)`` on an ``n x n`` grid in
    ``(x1, x2)`` (x2 periodic on ``[0, 2pi)``) and three time levels
    ``t0 - h, t0, t0 + h``.  Residuals are taken at the middle level,
    away from the x1 ends.

    Returns:
        max-norm residuals of the fixed-domain system with its ``eps Q div``
        terms (``maxwell``), of the same system without them (``plain``),
        of the divergence constraints (``div``), of the nu-augmented
        combination (``secsym``) and of the straightened system for the
        pulled-back field itself (``tilde``), plus the step ``h``.
    """
    from .vacuum import FieldGrid, assemble_B, maxwell_pieces, secsym_residual, interior_max

    check_gates(FrontDerivs(0.0, 0.0, 0.0, 0.0), eps)
    x1 = np.linspace(x1_range[0], x1_range[1], n)
    h = float(x1[1] - x1[0])
    x2 = np.arange(n) * (2.0 * math.pi / n)
    t = t0 + h * np.array([-1.0, 0.0, 1.0])
    T, X1, X2 = np.meshgrid(t, x1, x2, indexing="ij")
    Psi, d = psi(T, X1, X2)
    check_gates(d, eps)
    w_tilde = field(T, X1 + Psi, X2)
    grid = FieldGrid(t, x1, x2)
    pieces = maxwell_pieces(w_tilde, d, eps, grid)
    q1 = -eps * d.t / (1.0 + d.x1)
    m1 = pieces["m1"].copy()
    m2 = pieces["m2"].copy()
    m1[0] += eps * q1 * pieces["div_h"]
    m2[0] += eps * q1 * pieces["div_e"]
    maxwell = np.concatenate([m1, m2])
    sec = secsym_residual(w_tilde, np.asarray(nu, dtype=float).reshape(3, 1, 1, 1), d, eps, grid)

    # straightened system for w_tilde directly
    B1, B2, _ = assemble_B()
    dt_, h1, h2 = grid.spacing
    from .vacuum import _diff

    wt1 = _diff(w_tilde, h1, 2, False)
    wt2 = _diff(w_tilde, h2, 3, True)
    wtt = _diff(w_tilde, dt_, 1, False)
    a = 1.0 + d.x1
    tilde = (
        eps * wtt
        + (np.einsum("ij,j...->i...", B1, wt1) - eps * d.t * wt1 - d.x2 * np.einsum("ij,j...->i...", B2, wt1)) / a
        + np.einsum("ij,j...->i...", B2, wt2)
    )
    mid = (slice(None), slice(1, 2))
    return {
        "h": h,
        "maxwell": interior_max(maxwell[mid]),
        "plain": interior_max(sec["plain"][mid]),
        "div": interior_max(sec["div"][mid]),
        "secsym": interior_max(sec["secsym"][mid]),
        "tilde": interior_max(tilde[mid]),
    }


def transform_convergence(ns=(64, 128, 256), eps: float = 0.5, field=None, psi=None) -> dict:
    """Residual tables and fitted orders for :func:`maxwell_transform_residual`."""
    from .vacuum import order_fit

    field = PlaneWave(eps=eps) if field is None else field
    psi = AnalyticFront() if psi is None else psi
    rows = [maxwell_transform_residual(field, psi, eps, n) for n in ns]
    hs = [r["h"] for r in rows]
    keys = ("maxwell", "plain", "div", "secsym", "tilde")
    orders = {k: order_fit(hs, [r[k] for r in rows]) for k in keys}
    return {"rows": rows, "orders": orders}
