"""Flat ``key = value`` sweep configuration files.

Axis lines carry four comma-separated fields, ``min, max, count, spacing``
with spacing ``linear`` or ``log``; any other value is a fixed parameter
(parsed as a float when possible). ``#`` starts a comment.
"""

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import ConfigError

__all__ = ["Axis", "SweepConfig", "parse_config", "load_config", "default_config", "MODES", "MODE_SCHEMA"]

MODES = ("effective-grid", "cavity-kappa-scan", "cavity-grid", "robustness", "trajectories")

# mode -> (required axes, optional axes, fixed-parameter defaults)
MODE_SCHEMA = {
    "effective-grid": (
        ("beta_A", "beta_S"),
        (),
        {"gamma_plus": 1.0, "omega0": 1.0},
    ),
    "cavity-kappa-scan": (
        ("kappa_over_g",),
        ("p_over_g",),
        {"g_over_omega0": 1e-3, "gamma_over_g": 0.0, "p_over_g": 2e-4, "c_tol": 1e-4},
    ),
    "cavity-grid": (
        ("p_over_g", "kappa_over_g"),
        (),
        {"g_over_omega0": 1e-3, "gamma_over_g": 1e-3, "c_tol": 1e-4, "refine": 1.0},
    ),
    "robustness": (
        ("gamma_z_over_g", "delta_over_g", "p_c_over_g"),
        (),
        {
            "g_over_omega0": 1e-3,
            "gamma_over_g": 1e-3,
            "p_over_g": 5.424e-3,
            "kappa_over_g": 2.332,
            "c_tol": 1e-4,
        },
    ),
    "trajectories": (
        (),
        (),
        {
            "beta_A": -1.0,
            "beta_S": 2.0,
            "gamma_plus": 1.0,
            "omega0": 1.0,
            "n_traj": 10000.0,
            "duration": 20.0,
            "dump": "",
        },
    ),
}

_RESERVED = ("mode", "out", "seed", "workers")


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("axis count must be >= 2")
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.spacing == "log" and not (self.min > 0 and self.max > 0):
            raise ValueError("log spacing needs positive bounds")

    def values(self):
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass
class SweepConfig:
    mode: str
    axes: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)
    out: str | None = None
    seed: int = 0
    workers: int = 1

    def param(self, name):
        return self.fixed[name]


def _value(raw):
    try:
        return float(raw)
    except ValueError:
        return raw


def parse_config(text, source="<config>"):
    """Parse and validate config text; errors name the offending line."""
    entries = {}
    lines = {}
    for n, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"{source}:{n}: expected 'key = value', got {body!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{n}: empty key")
        if key in entries:
            raise ConfigError(f"{source}:{n}: duplicate key {key!r} (first set on line {lines[key]})")
        entries[key] = raw
        lines[key] = n

    mode = entries.get("mode")
    if mode is None:
        raise ConfigError(f"{source}: missing 'mode' (one of {', '.join(MODES)})")
    if mode not in MODE_SCHEMA:
        raise ConfigError(f"{source}:{lines['mode']}: unknown mode {mode!r}")
    required, optional, defaults = MODE_SCHEMA[mode]

    cfg = SweepConfig(mode=mode, fixed=dict(defaults))
    for key, raw in entries.items():
        n = lines[key]
        if key == "mode":
            continue
        if key == "out":
            cfg.out = raw
            continue
        if key in ("seed", "workers"):
            try:
                setattr(cfg, key, int(raw))
            except ValueError:
                raise ConfigError(f"{source}:{n}: {key} must be an integer, got {raw!r}") from None
            continue
        if key not in required and key not in optional and key not in defaults:
            raise ConfigError(f"{source}:{n}: unknown key {key!r} for mode {mode}")
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) == 4:
            if key not in required and key not in optional:
                raise ConfigError(f"{source}:{n}: {key!r} cannot be swept in mode {mode}")
            try:
                axis = Axis(float(parts[0]), float(parts[1]), int(parts[2]), parts[3])
            except ValueError as exc:
                raise ConfigError(f"{source}:{n}: bad axis {raw!r}: {exc}") from None
            cfg.axes[key] = axis
            cfg.fixed.pop(key, None)
        elif len(parts) == 1:
            if key in required:
                raise ConfigError(f"{source}:{n}: {key!r} must be an axis 'min, max, count, spacing'")
            cfg.fixed[key] = _value(raw)
        else:
            raise ConfigError(f"{source}:{n}: expected a scalar or 'min, max, count, spacing', got {raw!r}")
    missing = [a for a in required if a not in cfg.axes]
    if missing:
        raise ConfigError(f"{source}: missing axis definition(s) {missing} for mode {mode}")
    if cfg.workers < 1:
        raise ConfigError(f"{source}:{lines.get('workers', 0)}: workers must be >= 1")
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), source=str(path))


def default_config(name):
    """Checked-in config shipped with the package (``effective_grid``, ``cavity_grid_gamma1e-3`` ...)."""
    text = resources.files("steadyent").joinpath("configs", f"{name}.cfg").read_text(encoding="utf-8")
    return parse_config(text, source=f"{name}.cfg")
