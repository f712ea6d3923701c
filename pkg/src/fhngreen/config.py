"""Run configuration: JSON schema, presets and validation.

A configuration file is one JSON object. Every section is optional and
every key has a default (see :func:`default_config_dict`)::

    {
      "mode": "solve-fhn",            # kernel | solve-linear | solve-fhn | oracle | certify
      "params": {"eps": 0.1, "a": 1.0, "b": 1.0, "beta": 1.0, "L": 1.0, "T": 1.0},
      "scenario": "cubic-bump-neumann",   # preset name, or an inline object (below)
      "grid": {"nx": 32, "nt": 50},
      "tolerances": {"picard_tol": 1e-8, "max_iter": 50, "kernel_tol": 1e-10},
      "kernel": {"which": "K0", "x": [0.25], "t": [0.5]},
      "oracle": {"nx": 128, "scheme": "explicit_rk4", "dt": null, "times": 11},
      "certify": {"param_sets": null, "offgrid": 100, "kernel_bounds": true},
      "output": {"dir": "out"},
      "seed": 0
    }

An inline scenario is an object with keys ``bc`` (``Neumann`` or
``Dirichlet``), ``u0``, ``v0`` (number, list of uniform samples, or the
path of a text file holding one sample per line), ``left``, ``right``
(number or list), ``kinetics`` (``cubic``, ``none``, ``mckean`` or
``josephson``), ``f`` (number; linear source), ``eta_bar`` (``mckean``),
``gamma`` and ``memory_eps`` (``josephson``).
"""

from dataclasses import dataclass, field
import copy
import json
import math
import os

import numpy as np

from .errors import ConfigError, ConfigFileError, ConfigSyntaxError, DomainError
from .kernels import FhnParams
from .linear import DIRICHLET, NEUMANN

MODES = ("kernel", "solve-linear", "solve-fhn", "oracle", "certify")
KINETICS = ("cubic", "none", "mckean", "josephson")
KERNELS = ("K0", "K0_x", "K1", "K2", "theta0", "theta1", "theta2")


def _bump(x):
    return 0.3 * np.exp(-40.0 * (x - 0.35) ** 2)


def _cos_mode(x):
    return np.cos(np.pi * x)


# Profiles addressable by name from presets (not from user files).
PROFILES = {"bump": _bump, "cos": _cos_mode}

PRESETS = {
    "cubic-bump-neumann": {
        "params": {"eps": 0.1, "a": 1.0, "b": 1.0, "beta": 1.0},
        "scenario": {"bc": NEUMANN, "u0": "@bump", "v0": 0.05, "kinetics": "cubic"},
    },
    "cubic-bump-dirichlet": {
        "params": {"eps": 0.1, "a": 1.0, "b": 1.0, "beta": 1.0},
        "scenario": {"bc": DIRICHLET, "u0": "@bump", "v0": 0.0, "kinetics": "cubic"},
    },
    "mckean-step": {
        "params": {"eps": 0.1, "a": 0.25, "b": 0.5, "beta": 1.0},
        "scenario": {"bc": NEUMANN, "u0": "@bump", "v0": 0.05, "kinetics": "mckean",
                     "eta_bar": 1},
    },
    "josephson-line": {
        "params": {"eps": 0.1, "a": 0.7, "b": -0.35, "beta": 0.5},
        "scenario": {"bc": NEUMANN, "u0": "@bump", "v0": 0.0, "kinetics": "josephson",
                     "gamma": 0.1, "memory_eps": 2.0},
    },
    "heat-sanity": {
        "params": {"eps": 0.1, "a": 0.0, "b": 0.0, "beta": 1.0},
        "scenario": {"bc": NEUMANN, "u0": "@cos", "v0": 0.0, "kinetics": "none"},
    },
}

_SCENARIO_DEFAULTS = {"bc": NEUMANN, "u0": 0.0, "v0": 0.0, "left": 0.0, "right": 0.0,
                      "kinetics": "cubic", "f": 0.0, "eta_bar": 1, "gamma": 0.0,
                      "memory_eps": 1.0}

_DEFAULTS = {
    "mode": "solve-fhn",
    "params": {"eps": 0.1, "a": 1.0, "b": 1.0, "beta": 1.0, "L": 1.0, "T": 1.0},
    "scenario": "cubic-bump-neumann",
    "grid": {"nx": 32, "nt": 50},
    "tolerances": {"picard_tol": 1e-8, "max_iter": 50, "kernel_tol": 1e-10},
    "kernel": {"which": "K0", "x": [0.25], "t": [0.5]},
    "oracle": {"nx": 128, "scheme": "explicit_rk4", "dt": None, "times": 11},
    "certify": {"param_sets": None, "offgrid": 100, "kernel_bounds": True},
    "output": {"dir": "out"},
    "seed": 0,
}


def default_config_dict():
    return copy.deepcopy(_DEFAULTS)


@dataclass(frozen=True)
class Scenario:
    """Resolved data of one run. Profiles are numbers, sample arrays or callables.

    Equality compares the scalars and ``source``, the configuration entry
    the scenario was resolved from.
    """

    name: str
    bc: str
    u0: object = field(compare=False)
    v0: object = field(compare=False)
    left: object = field(compare=False)
    right: object = field(compare=False)
    kinetics: str
    f: float
    eta_bar: int
    gamma: float
    memory_eps: float
    source: object = None


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: FhnParams
    scenario: Scenario
    grid: dict
    tolerances: dict
    kernel: dict
    oracle: dict
    certify: dict
    output: dict
    seed: int
    base_dir: str = field(default=".", compare=False)

    def to_dict(self):
        """JSON-ready form; parsing it again gives an equal RunConfig."""
        return {
            "mode": self.mode,
            "params": self.params.as_dict(),
            "scenario": copy.deepcopy(self.scenario.source),
            "grid": dict(self.grid),
            "tolerances": dict(self.tolerances),
            "kernel": copy.deepcopy(self.kernel),
            "oracle": dict(self.oracle),
            "certify": copy.deepcopy(self.certify),
            "output": dict(self.output),
            "seed": self.seed,
        }


# ------------------------------------------------------------- validation

def _check_keys(section, given, allowed):
    for key in given:
        if key not in allowed:
            where = f"{section}.{key}" if section else key
            raise ConfigError(f"unknown configuration key {where!r}")


def _number(where, v, positive=False, integer=False, minimum=None):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{where} must be finite, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{where} must be an integer, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{where} must be positive, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where} must be >= {minimum}, got {v!r}")
    return int(v) if integer else float(v)


def _section(raw, name):
    base = copy.deepcopy(_DEFAULTS[name])
    given = raw.get(name, {})
    if given is None:
        given = {}
    if not isinstance(given, dict):
        raise ConfigError(f"{name} must be an object")
    _check_keys(name, given, base)
    base.update(given)
    return base


def _params(d, where="params"):
    _check_keys(where, d, _DEFAULTS["params"])
    full = dict(_DEFAULTS["params"], **d)
    for k in full:
        full[k] = _number(f"{where}.{k}", full[k], positive=k in ("eps", "L", "T"))
    try:
        return FhnParams(**full)
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _profile(where, v, base_dir, allow_named):
    if isinstance(v, bool):
        raise ConfigError(f"{where} must be a number, list or file path")
    if isinstance(v, (int, float)):
        return _number(where, v)
    if isinstance(v, list):
        if len(v) < 2:
            raise ConfigError(f"{where} needs at least 2 samples")
        arr = np.array([_number(f"{where}[{i}]", e) for i, e in enumerate(v)])
        return arr
    if isinstance(v, str):
        if v.startswith("@"):
            if not allow_named or v[1:] not in PROFILES:
                raise ConfigError(f"{where}: unknown named profile {v!r}")
            return PROFILES[v[1:]]
        path = v if os.path.isabs(v) else os.path.join(base_dir, v)
        if not os.path.isfile(path):
            raise ConfigError(f"{where}: input file {path} does not exist")
        try:
            arr = np.loadtxt(path, dtype=float, ndmin=1)
        except ValueError as exc:
            raise ConfigError(f"{where}: cannot read samples from {path}: {exc}") from exc
        if arr.ndim != 1 or arr.size < 2 or not np.all(np.isfinite(arr)):
            raise ConfigError(f"{where}: {path} must hold >= 2 finite samples, one per line")
        return arr
    raise ConfigError(f"{where} must be a number, list or file path, got {v!r}")


def _scenario(raw_sc, base_dir):
    named = isinstance(raw_sc, str)
    if named:
        if raw_sc not in PRESETS:
            raise ConfigError(f"scenario: unknown preset {raw_sc!r}; choose from {sorted(PRESETS)}")
        name, d = raw_sc, dict(_SCENARIO_DEFAULTS, **PRESETS[raw_sc]["scenario"])
    elif isinstance(raw_sc, dict):
        _check_keys("scenario", raw_sc, _SCENARIO_DEFAULTS)
        name, d = "inline", dict(_SCENARIO_DEFAULTS, **raw_sc)
    else:
        raise ConfigError("scenario must be a preset name or an object")
    if d["bc"] not in (NEUMANN, DIRICHLET):
        raise ConfigError(f"scenario.bc must be Neumann or Dirichlet, got {d['bc']!r}")
    if d["kinetics"] not in KINETICS:
        raise ConfigError(f"scenario.kinetics must be one of {KINETICS}, got {d['kinetics']!r}")
    if d["eta_bar"] not in (0, 1) or isinstance(d["eta_bar"], bool):
        raise ConfigError(f"scenario.eta_bar must be 0 or 1, got {d['eta_bar']!r}")
    return Scenario(
        name=name, bc=d["bc"],
        u0=_profile("scenario.u0", d["u0"], base_dir, named),
        v0=_profile("scenario.v0", d["v0"], base_dir, named),
        left=_profile("scenario.left", d["left"], base_dir, False),
        right=_profile("scenario.right", d["right"], base_dir, False),
        kinetics=d["kinetics"], f=_number("scenario.f", d["f"]),
        eta_bar=int(d["eta_bar"]), gamma=_number("scenario.gamma", d["gamma"]),
        memory_eps=_number("scenario.memory_eps", d["memory_eps"], positive=True),
        source=copy.deepcopy(raw_sc))


def _points(where, v):
    vals = v if isinstance(v, list) else [v]
    if not vals:
        raise ConfigError(f"{where} must not be empty")
    return [_number(f"{where}[{i}]", e) for i, e in enumerate(vals)]


def build_config(raw, base_dir="."):
    """Validate a decoded JSON object into a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    _check_keys("", raw, _DEFAULTS)
    mode = raw.get("mode", _DEFAULTS["mode"])
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
    raw_sc = raw.get("scenario", _DEFAULTS["scenario"])
    p_given = raw.get("params", {}) or {}
    if not isinstance(p_given, dict):
        raise ConfigError("params must be an object")
    _check_keys("params", p_given, _DEFAULTS["params"])
    preset_params = PRESETS[raw_sc]["params"] if isinstance(raw_sc, str) and raw_sc in PRESETS else {}
    params = _params(dict(preset_params, **p_given))

    grid = _section(raw, "grid")
    for k in grid:
        grid[k] = _number(f"grid.{k}", grid[k], integer=True, minimum=4 if k == "nx" else 1)
    tol = _section(raw, "tolerances")
    tol["picard_tol"] = _number("tolerances.picard_tol", tol["picard_tol"], positive=True)
    tol["kernel_tol"] = _number("tolerances.kernel_tol", tol["kernel_tol"], positive=True)
    tol["max_iter"] = _number("tolerances.max_iter", tol["max_iter"], integer=True, minimum=1)

    kern = _section(raw, "kernel")
    if kern["which"] not in KERNELS:
        raise ConfigError(f"kernel.which must be one of {KERNELS}, got {kern['which']!r}")
    kern["x"], kern["t"] = _points("kernel.x", kern["x"]), _points("kernel.t", kern["t"])
    if len(kern["x"]) != len(kern["t"]):
        raise ConfigError("kernel.x and kernel.t must have the same length")

    orc = _section(raw, "oracle")
    orc["nx"] = _number("oracle.nx", orc["nx"], integer=True, minimum=16)
    if orc["scheme"] not in ("explicit_rk4", "imex"):
        raise ConfigError(f"oracle.scheme must be explicit_rk4 or imex, got {orc['scheme']!r}")
    if orc["dt"] is not None:
        orc["dt"] = _number("oracle.dt", orc["dt"], positive=True)
    orc["times"] = _number("oracle.times", orc["times"], integer=True, minimum=2)

    cert = _section(raw, "certify")
    if cert["param_sets"] is not None:
        if not isinstance(cert["param_sets"], list) or not cert["param_sets"]:
            raise ConfigError("certify.param_sets must be a non-empty list or null")
        for i, ps in enumerate(cert["param_sets"]):
            if not isinstance(ps, dict):
                raise ConfigError(f"certify.param_sets[{i}] must be an object")
            _params(ps, f"certify.param_sets[{i}]")
    cert["offgrid"] = _number("certify.offgrid", cert["offgrid"], integer=True, minimum=0)
    if not isinstance(cert["kernel_bounds"], bool):
        raise ConfigError("certify.kernel_bounds must be true or false")

    out = _section(raw, "output")
    if not isinstance(out["dir"], str) or not out["dir"]:
        raise ConfigError("output.dir must be a non-empty string")
    seed = _number("seed", raw.get("seed", 0), integer=True, minimum=0)

    return RunConfig(mode=mode, params=params, scenario=_scenario(raw_sc, base_dir), grid=grid,
                     tolerances=tol, kernel=kern, oracle=orc, certify=cert, output=out,
                     seed=seed, base_dir=base_dir)


def param_sets(cfg):
    """Parameter sets of a certify run (the run's own params when none are listed)."""
    if cfg.certify["param_sets"] is None:
        return [cfg.params]
    return [_params(ps, f"certify.param_sets[{i}]")
            for i, ps in enumerate(cfg.certify["param_sets"])]


def parse_config(path):
    """Read and validate a JSON configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as exc:
        raise ConfigFileError(f"config file {path} not found") from exc
    except OSError as exc:
        raise ConfigFileError(f"config file {path} unreadable: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return build_config(raw, os.path.dirname(os.path.abspath(path)))


def dump_config(cfg, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


__all__ = ["RunConfig", "Scenario", "PRESETS", "MODES", "parse_config", "build_config",
           "default_config_dict", "dump_config", "param_sets"]
