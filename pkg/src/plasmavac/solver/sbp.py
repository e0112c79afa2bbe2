"""Second-order summation-by-parts first derivative (boundary order one)."""
from __future__ import annotations

import numpy as np

from ..errors import GridError


def norm_weights(n: int, h: float) -> np.ndarray:
    """Diagonal of the SBP norm ``H`` for ``n`` nodes."""
    if n < 3:
        raise GridError("SBP operator needs at least three nodes")
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def d1(u: np.ndarray, h: float, axis: int = -2) -> np.ndarray:
    """``H^{-1} Q u`` along ``axis``: central inside, one-sided at both ends."""
    u = np.moveaxis(u, axis, -1)
    out = np.empty_like(u)
    out[..., 1:-1] = (u[..., 2:] - u[..., :-2]) / (2.0 * h)
    out[..., 0] = (u[..., 1] - u[..., 0]) / h
    out[..., -1] = (u[..., -1] - u[..., -2]) / h
    return np.moveaxis(out, -1, axis)


def d_periodic(u: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Skew-symmetric central difference on a periodic axis."""
    return (np.roll(u, -1, axis=axis) - np.roll(u, 1, axis=axis)) / (2.0 * h)


def q_matrix(n: int) -> np.ndarray:
    """Dense ``Q`` (for tests): ``Q + Q^T = diag(-1, 0, ..., 0, 1)``."""
    q = 0.5 * (np.eye(n, k=1) - np.eye(n, k=-1))
    q[0, 0] = -0.5
    q[-1, -1] = 0.5
    return q
