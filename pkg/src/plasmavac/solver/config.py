"""Run configuration: schema, defaults and YAML loading."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields

import yaml

from ..errors import ConfigError

PRESETS = ("flat-static",)
CLOSURES = ("sat-upwind", "sat-neutral")
WEIGHTINGS = ("post", "shifted")
FORCINGS = ("none", "pulse")


@dataclass
class SolverConfig:
    """Every knob of a run.

    ``n1`` counts cells across each of the two slabs ``[-Lv, 0]`` and
    ``[0, Lp]``; ``n2`` counts periodic points on ``[0, 2pi)``.
    """

    n1: int = 64
    n2: int = 32
    length_plasma: float = 2.0
    length_vacuum: float = 2.0
    cfl: float = 0.5
    epsilon: float = 0.5
    t_final: float = 5.0
    gamma_list: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0, 16.0])
    preset: str = "flat-static"
    H_hat: list = field(default_factory=lambda: [0.0, 1.0, 0.0])
    calH_hat: list = field(default_factory=lambda: [0.0, 0.0, 3.0**0.5])
    calE1_hat: float = 0.0
    v_hat: list = field(default_factory=lambda: [0.0, 0.0, 0.0])
    S_hat: float = 0.0
    delta: float = 1e-3
    mu_star: float = 1e-2
    closure: str = "sat-upwind"
    weighting: str = "post"
    forcing: str = "pulse"
    forcing_amplitude: float = 1.0
    forcing_duration: float = 2.0
    taper: float = 0.2
    override_gates: bool = False
    seed: int = 0
    dump_fields: bool = True
    snapshots: int = 4

    def validate(self) -> None:
        """Collect every schema problem and raise them together."""
        p: list[str] = []
        for name in ("n1", "n2", "snapshots", "seed"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                p.append(f"{name}: expected an integer, got {v!r}")
        if isinstance(self.n1, int) and self.n1 < 4:
            p.append("n1: need at least 4 cells")
        if isinstance(self.n2, int) and (self.n2 < 4 or self.n2 % 2):
            p.append("n2: need an even number of at least 4 points")
        if not (isinstance(self.cfl, (int, float)) and 0.0 < self.cfl < 1.0):
            p.append(f"cfl: must lie in (0, 1), got {self.cfl!r}")
        if not (isinstance(self.epsilon, (int, float)) and 0.0 < self.epsilon < 1.0):
            p.append(f"epsilon: must lie in (0, 1), got {self.epsilon!r}")
        for name in ("length_plasma", "length_vacuum", "t_final", "forcing_duration", "delta", "mu_star"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0):
                p.append(f"{name}: must be a positive number, got {v!r}")
        if not isinstance(self.gamma_list, (list, tuple)) or not self.gamma_list:
            p.append("gamma_list: must be a non-empty list")
        else:
            for g in self.gamma_list:
                if not (isinstance(g, (int, float)) and g >= 1.0):
                    p.append(f"gamma_list: every gamma must be >= 1, got {g!r}")
        for name, n in (("H_hat", 3), ("calH_hat", 3), ("v_hat", 3)):
            v = getattr(self, name)
            if not (isinstance(v, (list, tuple)) and len(v) == n and all(isinstance(c, (int, float)) for c in v)):
                p.append(f"{name}: expected a list of {n} numbers, got {v!r}")
        if self.preset not in PRESETS:
            p.append(f"preset: unknown {self.preset!r}; choose from {PRESETS}")
        if self.closure not in CLOSURES:
            p.append(f"closure: unknown {self.closure!r}; choose from {CLOSURES}")
        if self.weighting not in WEIGHTINGS:
            p.append(f"weighting: unknown {self.weighting!r}; choose from {WEIGHTINGS}")
        if self.forcing not in FORCINGS:
            p.append(f"forcing: unknown {self.forcing!r}; choose from {FORCINGS}")
        if not (isinstance(self.taper, (int, float)) and 0.0 <= self.taper < 1.0):
            p.append(f"taper: must lie in [0, 1), got {self.taper!r}")
        if p:
            raise ConfigError(p)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def config_from_dict(data: dict | None) -> SolverConfig:
    data = {} if data is None else data
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected a mapping"])
    known = {f.name for f in fields(SolverConfig)}
    unknown = sorted(set(data) - known)
    problems = [f"{k}: unknown key" for k in unknown]
    cfg = SolverConfig(**{k: v for k, v in data.items() if k in known})
    try:
        cfg.validate()
    except ConfigError as exc:
        problems.extend(exc.problems)
    if problems:
        raise ConfigError(problems)
    return cfg


def load_config(path) -> SolverConfig:
    """Read a YAML file into a validated :class:`SolverConfig`."""
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc}"]) from exc
    except yaml.YAMLError as exc:
        raise ConfigError([f"invalid YAML: {exc}"]) from exc
    return config_from_dict(data)
