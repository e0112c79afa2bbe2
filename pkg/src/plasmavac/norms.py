"""Gamma-weighted Sobolev and conormal norms on sampled grids.

Grid fields carry axes ``(..., t, x1, x2)``; leading axes (components) are
summed.  The ``x2`` axis is periodic, ``t`` and ``x1`` are not.  All
``*_norm`` functions return *squared* norms, since that is the quantity that
enters energy estimates; take a square root for the norm itself.

Quadrature is the trapezoidal rule on non-periodic axes and the rectangle
rule on periodic ones, summed with :func:`math.fsum` so that the result does
not depend on the memory layout.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import GridError

SIGMA_TAG = "quintic blend: sigma=x1 on [0,1/2], 1 on [1,inf)"
DEFAULT_TAPER = 0.2


def _blend(x):
    x = np.clip(x, 0.0, 1.0)
    return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)


def _blend_prime(x):
    inside = (x > 0.0) & (x < 1.0)
    x = np.clip(x, 0.0, 1.0)
    return np.where(inside, 30.0 * x * x * (1.0 - x) ** 2, 0.0)


def sigma(x1):
    """Conormal weight: ``x1`` near the wall, 1 away from it, monotone between."""
    x = np.abs(np.asarray(x1, dtype=float))
    s = _blend(2.0 * x - 1.0)
    return (1.0 - s) * x + s


def sigma_prime(x1):
    x = np.abs(np.asarray(x1, dtype=float))
    s = _blend(2.0 * x - 1.0)
    ds = 2.0 * _blend_prime(2.0 * x - 1.0)
    return (1.0 - s) + ds * (1.0 - x)


def lambda_multiplier(xi_sq, s: float, gamma: float):
    """``(gamma^2 + |xi|^2)^(s/2)`` given ``|xi|^2``."""
    return (gamma * gamma + np.asarray(xi_sq, dtype=float)) ** (0.5 * s)


@dataclass(frozen=True)
class Grid3:
    """Uniform sample axes ``t``, ``x1`` (non-periodic) and ``x2`` (periodic)."""

    t: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    period2: float = 2.0 * math.pi

    def __post_init__(self):
        for name in ("t", "x1", "x2"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim != 1 or a.size < 1:
                raise GridError(f"axis {name} must be a non-empty 1-D array")
            object.__setattr__(self, name, a)
            if a.size > 2 and not _uniform(a):
                raise GridError(f"axis {name} is not uniform")

    @property
    def shape(self):
        return (self.t.size, self.x1.size, self.x2.size)


def _uniform(a: np.ndarray) -> bool:
    d = np.diff(a)
    return bool(np.all(d > 0) and np.max(np.abs(d - d[0])) <= 1e-9 * max(abs(d[0]), 1e-300))


def _trap_weights(a: np.ndarray) -> np.ndarray:
    if a.size == 1:
        return np.ones(1)
    h = a[1] - a[0]
    w = np.full(a.size, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _integrate(f2: np.ndarray, grid: Grid3) -> float:
    """Sum of ``f2`` over components and the three grid axes."""
    wt = _trap_weights(grid.t)
    w1 = _trap_weights(grid.x1)
    w2 = np.full(grid.x2.size, grid.period2 / grid.x2.size)
    f = f2.reshape((-1,) + grid.shape)
    weighted = f * wt[None, :, None, None] * w1[None, None, :, None] * w2[None, None, None, :]
    return math.fsum(weighted.ravel().tolist())


def _check(u, grid: Grid3) -> np.ndarray:
    a = np.asarray(u, dtype=float)
    if a.ndim < 3:
        raise GridError("field needs a time axis: expected (..., t, x1, x2)")
    if a.shape[-3:] != grid.shape:
        raise GridError(f"field shape {a.shape[-3:]} does not match grid {grid.shape}")
    return a


def _d(a: np.ndarray, coords: np.ndarray, axis: int) -> np.ndarray:
    if coords.size < 3:
        return np.zeros_like(a)
    return np.gradient(a, coords, axis=axis, edge_order=2)


def _d2_periodic(a: np.ndarray, grid: Grid3) -> np.ndarray:
    h = grid.period2 / grid.x2.size
    return (np.roll(a, -1, axis=-1) - np.roll(a, 1, axis=-1)) / (2.0 * h)


def L2_norm(u, grid: Grid3) -> float:
    a = _check(u, grid)
    return _integrate(a * a, grid)


def H1_gamma_norm(u, gamma: float, grid: Grid3) -> float:
    """``gamma^2 ||u||^2 + ||u_t||^2 + ||u_1||^2 + ||u_2||^2`` (squared)."""
    _gamma_ok(gamma)
    a = _check(u, grid)
    parts = [gamma * gamma * a * a]
    parts.append(_d(a, grid.t, -3) ** 2)
    parts.append(_d(a, grid.x1, -2) ** 2)
    parts.append(_d2_periodic(a, grid) ** 2)
    return _integrate(sum(parts), grid)


def conormal_H1_norm(u, gamma: float, grid: Grid3, wall: float | None = None) -> float:
    """Tangential ``H^1`` norm with the degenerate normal field ``sigma d_1`` (squared).

    Args:
        wall: ``x1`` position of the boundary; defaults to the first node.
    """
    _gamma_ok(gamma)
    a = _check(u, grid)
    w = grid.x1[0] if wall is None else wall
    sig = sigma(grid.x1 - w)[:, None]
    parts = [gamma * gamma * a * a]
    parts.append(_d(a, grid.t, -3) ** 2)
    parts.append((sig * _d(a, grid.x1, -2)) ** 2)
    parts.append(_d2_periodic(a, grid) ** 2)
    return _integrate(sum(parts), grid)


def _gamma_ok(gamma: float) -> None:
    if not gamma >= 1.0:
        raise ValueError(f"gamma must be >= 1, got {gamma}")


# ---------------------------------------------------------------------------
# Fourier side


def tukey_right(n: int, alpha: float = DEFAULT_TAPER) -> np.ndarray:
    """Window equal to 1 except for a cosine roll-off over the last ``alpha`` fraction."""
    w = np.ones(n)
    if alpha <= 0.0 or n < 2:
        return w
    m = max(1, int(round(alpha * (n - 1))))
    k = np.arange(m + 1)
    w[n - 1 - m :] = 0.5 * (1.0 + np.cos(math.pi * k / m))
    return w


def taper_metadata(alpha: float = DEFAULT_TAPER) -> dict:
    return {
        "time_window": "tukey, right end only" if alpha > 0 else "none",
        "alpha": alpha,
        "reason": "data vanish for t<0; the roll-off periodises the final time",
    }


def torus_norm(u, s: float, gamma: float, lengths) -> float:
    """``V sum (gamma^2+|xi|^2)^s |c_xi|^2`` over the trailing ``len(lengths)`` axes (squared)."""
    a = np.asarray(u, dtype=float)
    nd = len(lengths)
    axes = tuple(range(-nd, 0))
    shape = a.shape[-nd:]
    c = np.fft.fftn(a, axes=axes) / np.prod(shape)
    ks = np.meshgrid(
        *[np.fft.fftfreq(n, d=L / (2.0 * math.pi * n)) for n, L in zip(shape, lengths)], indexing="ij"
    )
    xi_sq = sum(k * k for k in ks)
    weight = lambda_multiplier(xi_sq, 2.0 * s, gamma)
    return float(np.prod(lengths)) * math.fsum((weight * np.abs(c) ** 2).ravel().tolist())


def trace_Hhalf_gamma(u_trace, gamma: float, t, x2, taper: float = DEFAULT_TAPER, period2: float = 2.0 * math.pi) -> float:
    """``H^{1/2}_gamma`` norm (squared) of a boundary trace ``(..., t, x2)``.

    The time axis is tapered at its right end and periodised over
    ``nt * dt``; ``x2`` is already periodic.
    """
    _gamma_ok(gamma)
    a = np.asarray(u_trace, dtype=float)
    t = np.asarray(t, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if a.ndim < 2 or a.shape[-2:] != (t.size, x2.size):
        raise GridError("trace must have trailing axes (t, x2) matching the sample axes")
    if (t.size > 2 and not _uniform(t)) or (x2.size > 2 and not _uniform(x2)):
        raise GridError("trace norm needs uniform sampling")
    dt = t[1] - t[0] if t.size > 1 else 1.0
    a = a * tukey_right(t.size, taper)[:, None]
    return torus_norm(a, 0.5, gamma, (dt * t.size, period2))


def fourier_H1_gamma(u, gamma: float, lengths) -> float:
    """Fourier-side ``H^1_gamma`` norm (squared) of a fully periodic field."""
    return torus_norm(u, 1.0, gamma, lengths)


def periodic_derivative_H1_gamma(u, gamma: float, lengths) -> float:
    """Derivative-side ``H^1_gamma`` norm (squared) of a periodic field, central differences."""
    a = np.asarray(u, dtype=float)
    nd = len(lengths)
    shape = a.shape[-nd:]
    cell = float(np.prod([L / n for L, n in zip(lengths, shape)]))
    total = gamma * gamma * a * a
    for k, (L, n) in enumerate(zip(lengths, shape)):
        ax = a.ndim - nd + k
        h = L / n
        total = total + ((np.roll(a, -1, axis=ax) - np.roll(a, 1, axis=ax)) / (2.0 * h)) ** 2
    return cell * math.fsum(total.ravel().tolist())


# ---------------------------------------------------------------------------
# Output


def write_norm_csv(path, rows) -> None:
    """Write ``(gamma, norm_name, value)`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gamma", "norm_name", "value"])
        for g, name, val in rows:
            w.writerow([repr(float(g)), name, repr(float(val))])
