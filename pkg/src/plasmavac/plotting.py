"""Matplotlib figures for run reports (files only, no interactive display)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path, manifest: dict) -> Path:
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=110, metadata={"Description": f"manifest_id={manifest['manifest_id']}", "Software": None})
    plt.close(fig)
    manifest["files"].append(Path(path).name)
    return path


def plot_sweep(rows: list[dict], path: Path, manifest: dict, trend: dict | None = None) -> Path:
    g = np.array([r["gamma"] for r in rows])
    R = np.array([r["ratio"] for r in rows])
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.semilogx(g, R, "o-", base=2)
    ax.set_xlabel("gamma")
    ax.set_ylabel("R(gamma) = gamma LHS / ||F||^2")
    if trend:
        ax.set_title(f"max/min = {trend['max_over_min']:.3g}, bounded = {trend['bounded']}")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    return _save(fig, path, manifest)


def plot_energy(t, E, path: Path, manifest: dict) -> Path:
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    ax.plot(t, E)
    ax.set_xlabel("t")
    ax.set_ylabel("discrete energy")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path, manifest)


def plot_constraints(rows: list[dict], path: Path, manifest: dict) -> Path:
    t = [r["t"] for r in rows]
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for key in ("div_h_interior", "div_h_vac_interior", "div_e_vac_interior", "h1_boundary", "h1_vac_boundary"):
        vals = np.maximum([r[key] for r in rows], 1e-300)
        ax.semilogy(t, vals, label=key)
    ax.set_xlabel("t")
    ax.set_ylabel("max residual")
    ax.legend(fontsize=7)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save(fig, path, manifest)


def plot_fields(result, path: Path, manifest: dict) -> Path:
    """Final normal velocity, vacuum ``calH3`` and the front."""
    s = result.final
    g = result.grid
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6))
    for ax, x1, f, title in (
        (axes[0], g["x1_plasma"], s.U[1], "u1 (plasma)"),
        (axes[1], g["x1_vacuum"], s.W[2], "calH3 (vacuum)"),
    ):
        m = ax.pcolormesh(g["x2"], x1, f, shading="auto", cmap="RdBu_r")
        fig.colorbar(m, ax=ax)
        ax.set_xlabel("x2")
        ax.set_ylabel("x1")
        ax.set_title(title)
    axes[2].plot(g["x2"], s.phi)
    axes[2].set_xlabel("x2")
    axes[2].set_title(f"front phi at t = {s.t:.3g}")
    fig.tight_layout()
    return _save(fig, path, manifest)


def plot_lift(lift, x2, path: Path, manifest: dict) -> Path:
    """``Psi(x1, x2)`` at ``x3 = 0`` for the first time slice."""
    psi = lift.psi.reshape(-1, *lift.psi.shape[-3:])[0][:, :, 0]
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    m = ax.pcolormesh(x2, lift.x1, psi, shading="auto", cmap="RdBu_r")
    fig.colorbar(m, ax=ax)
    ax.set_xlabel("x2")
    ax.set_ylabel("x1")
    ax.set_title("lifted front Psi")
    fig.tight_layout()
    return _save(fig, path, manifest)
