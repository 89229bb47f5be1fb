"""Run configuration: TOML or JSON files resolved against defaults."""

from __future__ import annotations

import copy
import json
import sys
from pathlib import Path

from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULTS = {
    "mass": 0.0,
    "seed": 0,
    "out": "out",
    "threads": 1,
    "eps": {"start": 1e-2, "stop": 1e-4},
    "omegas": [0.5, 1.0, 1.5, 2.0],
    "grid": {"r_max": None, "radial_panels": 20, "l_max": 4},
    "worldlines": [{"id": "inertial", "kind": "inertial"}],
    "distributions": [],
    "detector": {"worldline": None, "window": {"family": "gaussian-bump",
                                                "params": {"center": 0.0, "width": 1.0}},
                 "backend": None, "symmetric": True},
    "kms": {"min_points": 4},
    "commutator": {"pairs": [], "oracle": True},
    "wavefront": {"distribution": 0, "smooth": None, "spatial": 20, "tilted": 20,
                  "random": 0, "radii": {"lo": 1.0, "hi": 1e5, "per_decade": 10},
                  "n_max": 6.0, "floor": 1e-13},
    "translate": {"distribution": 0, "step": 0.5, "count": 6, "shift": 1,
                  "rule": "fermi-walker", "word_sets": 20, "words_per_set": 5},
    "hadamard": {"order": 8, "dtau": [0.05, 0.075, 0.1, 0.15, 0.2]},
    "angular": {"distribution": 0},
}

# tables merged key by key; "eps" may be replaced wholesale by a list
_SECTIONS = tuple(k for k, v in DEFAULTS.items() if isinstance(v, dict) and k != "eps")


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if key in _SECTIONS and not path:
            if not isinstance(value, dict):
                raise ConfigError(f"config key {where!r} must be a table")
            out[key] = _merge(base[key], value, where + ".")
        else:
            out[key] = copy.deepcopy(value)
    return out


def parse_text(text: str, fmt: str) -> dict:
    try:
        if fmt == "json":
            data = json.loads(text)
        else:
            data = tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a table")
    return data


def load_config(path=None, overrides: dict | None = None) -> dict:
    """Defaults, then the file at ``path`` (.json or TOML), then ``overrides``."""
    data = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc}") from exc
        data = parse_text(text, "json" if p.suffix.lower() == ".json" else "toml")
    cfg = _merge(DEFAULTS, data)
    for key, value in (overrides or {}).items():
        if value is not None:
            cfg[key] = value
    validate(cfg)
    return cfg


def _positive(value, name, allow_none=False):
    if value is None and allow_none:
        return
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
        raise ConfigError(f"{name} must be a positive number")


def validate(cfg: dict):
    if not isinstance(cfg["mass"], (int, float)) or cfg["mass"] < 0:
        raise ConfigError("mass must be a non-negative number")
    if not isinstance(cfg["seed"], int) or cfg["seed"] < 0:
        raise ConfigError("seed must be a non-negative integer")
    if not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise ConfigError("threads must be a positive integer")
    eps = cfg["eps"]
    if isinstance(eps, dict):
        _positive(eps.get("start"), "eps.start")
        _positive(eps.get("stop"), "eps.stop")
        if eps["stop"] > eps["start"]:
            raise ConfigError("eps.stop must not exceed eps.start")
    elif not (isinstance(eps, list) and eps and all(isinstance(e, (int, float)) and e > 0 for e in eps)):
        raise ConfigError("eps must be a table {start, stop} or a list of positive numbers")
    om = cfg["omegas"]
    if not isinstance(om, list) or not all(isinstance(o, (int, float)) for o in om):
        raise ConfigError("omegas must be a list of numbers")
    g = cfg["grid"]
    _positive(g["r_max"], "grid.r_max", allow_none=True)
    if not isinstance(g["radial_panels"], int) or g["radial_panels"] < 1:
        raise ConfigError("grid.radial_panels must be a positive integer")
    if not isinstance(g["l_max"], int) or g["l_max"] < 0:
        raise ConfigError("grid.l_max must be a non-negative integer")
    if not isinstance(cfg["worldlines"], list) or not cfg["worldlines"]:
        raise ConfigError("worldlines must be a non-empty list")
    ids = [w.get("id") for w in cfg["worldlines"] if isinstance(w, dict)]
    if len(ids) != len(cfg["worldlines"]) or None in ids or len(set(ids)) != len(ids):
        raise ConfigError("every worldline needs a unique id")
    if not isinstance(cfg["distributions"], list):
        raise ConfigError("distributions must be a list")
    for d in cfg["distributions"]:
        if not isinstance(d, dict) or "terms" not in d or d.get("worldline_id") not in ids:
            raise ConfigError("each distribution needs terms and a known worldline_id")


def dump(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, indent=2)
