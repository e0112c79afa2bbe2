"""Small dense linear algebra for matrices of order at most 8.

Every spectral or determinant claim in the toolkit is checked through these
kernels, so they are written out explicitly instead of delegating to LAPACK:
the test-suite then compares them against :mod:`numpy.linalg` as an
independent route.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import AsymmetryError, ConvergenceError, ShapeError, SingularMatrixError

MAX_ORDER = 8
JACOBI_SWEEPS = 50
JACOBI_THRESHOLD = 1e-14
DEFAULT_ZERO_TOL = 1e-10


def as_small_matrix(m) -> np.ndarray:
    """Validate and copy ``m`` as a float square matrix of order 1..8."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if not 1 <= a.shape[0] <= MAX_ORDER:
        raise ShapeError(f"order {a.shape[0]} outside 1..{MAX_ORDER}")
    if not np.all(np.isfinite(a)):
        raise ShapeError("matrix has non-finite entries")
    return a


def frobenius(m: np.ndarray) -> float:
    return float(math.sqrt(float(np.sum(m * m))))


def asymmetry(m) -> float:
    """Largest entry of ``|M - M^T|``."""
    a = as_small_matrix(m)
    return float(np.max(np.abs(a - a.T)))


def is_symmetric(m, tol: float = 1e-12) -> bool:
    a = as_small_matrix(m)
    return asymmetry(a) <= tol * max(1.0, frobenius(a))


def char_poly(m) -> np.ndarray:
    """Characteristic polynomial ``det(tau I - M)`` by Faddeev-LeVerrier.

    Returns:
        Coefficients in ascending degree; the last one is 1.
    """
    a = as_small_matrix(m)
    n = a.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[n] = 1.0
    mk = np.zeros_like(a)
    eye = np.eye(n)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[n - k + 1] * eye
        coeffs[n - k] = -np.trace(a @ mk) / k
    return coeffs


def poly_eval(coeffs, x):
    """Horner evaluation of an ascending-coefficient polynomial."""
    out = np.zeros_like(np.asarray(x, dtype=float))
    for c in np.asarray(coeffs)[::-1]:
        out = out * x + c
    return out


def trim_poly(coeffs, tol: float = 1e-14) -> np.ndarray:
    """Drop leading coefficients that are zero relative to the largest one."""
    c = np.asarray(coeffs, dtype=float)
    scale = max(1.0, float(np.max(np.abs(c)))) if c.size else 1.0
    k = c.size
    while k > 1 and abs(c[k - 1]) <= tol * scale:
        k -= 1
    return c[:k]


def sign_changes(coeffs) -> int:
    """Number of sign changes in a coefficient sequence (zeros skipped)."""
    signs = [np.sign(c) for c in coeffs if c != 0.0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _offdiag_sq(a: list) -> float:
    n = len(a)
    return 2.0 * math.fsum(a[p][q] * a[p][q] for p in range(n) for q in range(p + 1, n))


def sym_eigen(m, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    The matrices are at most 8x8, so the sweep runs on Python floats; array
    dispatch would cost more than the arithmetic.

    Args:
        m: symmetric matrix (order <= 8).
        tol: symmetry tolerance, relative to ``max(1, ||M||_F)``; also the
            bound on the final off-diagonal residual relative to ``||M||_F``.

    Returns:
        ``(w, V)`` with ascending eigenvalues ``w`` and orthonormal columns
        ``V`` such that ``M V = V diag(w)``.

    Raises:
        AsymmetryError: ``M`` is not symmetric within ``tol``.
        ConvergenceError: the 50-sweep budget ran out.
    """
    arr = as_small_matrix(m)
    if asymmetry(arr) > tol * max(1.0, frobenius(arr)):
        raise AsymmetryError(f"asymmetry {asymmetry(arr):.3e} exceeds tolerance")
    n = arr.shape[0]
    norm = frobenius(arr)
    if norm == 0.0 or n == 1:
        return np.diag(arr).copy(), np.eye(n)
    a = (0.5 * (arr + arr.T)).tolist()
    v = np.eye(n).tolist()
    target_sq = (JACOBI_THRESHOLD * norm) ** 2
    rng_n = range(n)
    for _ in range(JACOBI_SWEEPS):
        if _offdiag_sq(a) <= target_sq:
            break
        for p in range(n - 1):
            ap_row = a[p]
            for q in range(p + 1, n):
                apq = ap_row[q]
                if apq == 0.0:
                    continue
                diff = a[q][q] - ap_row[p]
                if abs(apq) <= 1e-18 * abs(diff):
                    # rotation angle below rounding: zeroing is exact to working precision
                    ap_row[q] = a[q][p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = ap_row[p], a[q][q]
                for k in rng_n:
                    if k != p and k != q:
                        akp, akq = a[k][p], a[k][q]
                        nkp = c * akp - s * akq
                        nkq = s * akp + c * akq
                        a[k][p] = a[p][k] = nkp
                        a[k][q] = a[q][k] = nkq
                    vk = v[k]
                    vkp, vkq = vk[p], vk[q]
                    vk[p] = c * vkp - s * vkq
                    vk[q] = s * vkp + c * vkq
                a[p][p] = app - t * apq
                a[q][q] = aqq + t * apq
                a[p][q] = a[q][p] = 0.0
    else:
        if _offdiag_sq(a) > max(target_sq, (tol * norm) ** 2):
            raise ConvergenceError(f"Jacobi did not converge in {JACOBI_SWEEPS} sweeps")
    if _offdiag_sq(a) > (tol * norm) ** 2:
        raise ConvergenceError("Jacobi off-diagonal residual above tolerance")
    w = np.array([a[k][k] for k in rng_n])
    order = np.argsort(w, kind="stable")
    return w[order], np.array(v)[:, order]


def sym_eigvals(m, tol: float = 1e-12) -> np.ndarray:
    return sym_eigen(m, tol)[0]


def signature_count(m, zero_tol: float = DEFAULT_ZERO_TOL) -> tuple[int, int, int]:
    """Inertia ``(n_neg, n_zero, n_pos)`` of a symmetric matrix.

    An eigenvalue counts as zero when ``|lambda| <= zero_tol * ||M||_F``.
    """
    a = as_small_matrix(m)
    if asymmetry(a) > max(zero_tol, 1e-12) * max(1.0, frobenius(a)):
        raise AsymmetryError("signature_count needs a symmetric matrix")
    w = sym_eigvals(a, tol=max(zero_tol, 1e-12))
    cut = zero_tol * frobenius(a)
    neg = int(np.sum(w < -cut))
    pos = int(np.sum(w > cut))
    return neg, a.shape[0] - neg - pos, pos


def lu_factor(m) -> tuple[np.ndarray, np.ndarray, int]:
    """LU factorisation with partial pivoting, packed in one array.

    Returns:
        ``(lu, perm, sign)``: unit-lower ``L`` below the diagonal, ``U`` on and
        above it, the row permutation, and the permutation parity.
    """
    lu = as_small_matrix(m)
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1
    for k in range(n):
        piv = k + int(np.argmax(np.abs(lu[k:, k])))
        if piv != k:
            lu[[k, piv]] = lu[[piv, k]]
            perm[[k, piv]] = perm[[piv, k]]
            sign = -sign
        if lu[k, k] == 0.0:
            continue
        lu[k + 1 :, k] /= lu[k, k]
        lu[k + 1 :, k + 1 :] -= np.outer(lu[k + 1 :, k], lu[k, k + 1 :])
    return lu, perm, sign


def det(m) -> float:
    lu, _, sign = lu_factor(m)
    return float(sign * np.prod(np.diag(lu)))


def _check_pivots(lu: np.ndarray, scale: float, tol: float) -> None:
    piv = np.abs(np.diag(lu))
    if scale == 0.0 or np.min(piv) <= tol * scale:
        raise SingularMatrixError(
            f"matrix singular to tolerance (min pivot {np.min(piv):.3e}, scale {scale:.3e})"
        )


def solve(m, b, tol: float = 1e-13) -> np.ndarray:
    """Solve ``M x = b`` (``b`` may have several columns)."""
    a = as_small_matrix(m)
    lu, perm, _ = lu_factor(a)
    _check_pivots(lu, float(np.max(np.abs(a))), tol)
    rhs = np.array(b, dtype=float)
    if rhs.shape[0] != a.shape[0]:
        raise ShapeError(f"rhs has {rhs.shape[0]} rows, matrix order {a.shape[0]}")
    x = rhs[perm].copy()
    n = a.shape[0]
    for i in range(n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in reversed(range(n)):
        x[i] = (x[i] - lu[i, i + 1 :] @ x[i + 1 :]) / lu[i, i]
    return x


def inverse(m, tol: float = 1e-13) -> np.ndarray:
    """Matrix inverse through :func:`lu_factor`.

    Raises:
        SingularMatrixError: a pivot is below ``tol * max|M_ij|``.
        ShapeError: non-square or oversized input.
    """
    a = as_small_matrix(m)
    return solve(a, np.eye(a.shape[0]), tol)
