"""Structured run output: manifest, CSV tables, JSON reports and field dumps.

Every file written here carries the manifest id: JSON documents under the
``manifest_id`` key, CSV files in a leading ``# manifest_id=...`` comment
line, ``.npz`` archives as a ``manifest_id`` array and PNG figures in their
``Description`` metadata.  No timestamps are stored, so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from . import __version__
from .geometry import CHI_TAG
from .norms import SIGMA_TAG

ENV_OUT = "PLASMAVAC_OUT"
DEFAULT_OUT = "plasmavac-out"

NORM_COLUMNS = ("gamma", "norm_name", "value")
SWEEP_COLUMNS = ("gamma", "ratio", "lhs", "U_H1tan", "W_H1", "trace_Hhalf", "phi_H1", "F_H1tan")
NORM_NAMES = ("U_H1tan", "W_H1", "trace_Hhalf", "phi_H1", "F_H1tan", "lhs", "ratio")


def output_dir(arg: str | None) -> Path:
    """``--out`` if given, else ``$PLASMAVAC_OUT``, else ``./plasmavac-out``."""
    path = Path(arg or os.environ.get(ENV_OUT) or DEFAULT_OUT)
    path.mkdir(parents=True, exist_ok=True)
    return path


def make_manifest(command: str, config_digest: str | None, seed: int, **extra) -> dict:
    ident = hashlib.sha256(
        json.dumps([command, config_digest, seed, __version__], sort_keys=True).encode()
    ).hexdigest()[:16]
    return {
        "manifest_id": ident,
        "command": command,
        "config_digest": config_digest,
        "seed": seed,
        "version": __version__,
        "chi_profile": CHI_TAG,
        "sigma_profile": SIGMA_TAG,
        **extra,
        "files": [],
    }


def to_jsonable(obj):
    """Convert numpy containers and non-finite floats for :func:`json.dumps`."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def write_json(path: Path, data: dict, manifest: dict) -> Path:
    doc = {"manifest_id": manifest["manifest_id"], **to_jsonable(data)}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    manifest["files"].append(path.name)
    return path


def write_csv(path: Path, header, rows, manifest: dict) -> Path:
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest_id={manifest['manifest_id']}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    manifest["files"].append(path.name)
    return path


def norm_rows(table: list[dict]):
    """Long-format ``(gamma, norm_name, value)`` rows of a norm table."""
    for row in table:
        for name in NORM_NAMES:
            yield (float(row["gamma"]), name, float(row[name]))


def write_norm_table(path: Path, table: list[dict], manifest: dict) -> Path:
    return write_csv(path, NORM_COLUMNS, norm_rows(table), manifest)


def write_sweep_table(path: Path, table: list[dict], manifest: dict) -> Path:
    return write_csv(path, SWEEP_COLUMNS, ([float(r[c]) for c in SWEEP_COLUMNS] for r in table), manifest)


def write_fields(path: Path, result, manifest: dict) -> Path:
    """Snapshots of ``U``, ``W`` and ``phi`` with their times and grids."""
    frames = result.snapshots
    data = {
        "manifest_id": np.array(manifest["manifest_id"]),
        "t": np.array([f.t for f in frames]),
        "U": np.array([f.U for f in frames]).reshape(len(frames), *result.final.U.shape),
        "W": np.array([f.W for f in frames]).reshape(len(frames), *result.final.W.shape),
        "phi": np.array([f.phi for f in frames]).reshape(len(frames), *result.final.phi.shape),
        **{k: np.asarray(v) for k, v in result.grid.items()},
    }
    np.savez_compressed(path, **data)
    manifest["files"].append(path.name)
    return path


def finish_manifest(out: Path, manifest: dict) -> Path:
    path = out / "manifest.json"
    manifest["files"] = sorted(set(manifest["files"]))
    path.write_text(json.dumps(to_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return path
