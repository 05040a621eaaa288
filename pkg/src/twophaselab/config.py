"""Run configuration: one strict JSON document drives every scenario.

Top-level shape:

    {
      "schema": 1,
      "model": {A1, A2, gamma, alpha, mu, rho_minus, n_minus, u_minus, u_plus},
      "scenario": "classify" | "stationary" | "evolve" | "sweep",
      "grid": {"n_nodes": 4096, "L": number | "auto"},        # optional
      "seed": 0,                                              # optional
      "force_regime": "Supersonic"|"Subsonic"|"Sonic",        # optional
      "evolve": {"t_end", "report_every", "perturbation"},    # scenario=evolve
      "sweep": {"delta_list": [...]},                         # scenario=sweep
    }

Unknown keys are rejected at every level.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .model import FarFieldData, ModelParams, model_from_config
from .stationary import GridSpec

SCENARIOS = ("classify", "stationary", "evolve", "sweep")
_TOP_KEYS = {"schema", "model", "scenario", "grid", "seed", "force_regime",
             "evolve", "sweep"}
_GRID_KEYS = {"n_nodes", "L"}
_EVOLVE_KEYS = {"t_end", "report_every", "perturbation", "snapshot"}
_PERT_KEYS = {"kind", "center", "width", "fields", "amplitude", "h1_target", "max_h1"}
_SWEEP_KEYS = {"delta_list"}


@dataclass
class RunConfig:
    params: ModelParams
    far: FarFieldData
    scenario: str
    grid: GridSpec
    seed: int = 0
    force_regime: str | None = None
    evolve: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _require_number(section, key, positive=False):
    v = section.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(f"{key} must be a number")
    v = float(v)
    if positive and v <= 0:
        raise ConfigError(f"{key} must be positive")
    return v


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    if doc.get("schema") != 1:
        raise ConfigError("configuration must declare schema = 1")
    if "model" not in doc:
        raise ConfigError("missing model section")
    params, far = model_from_config(doc["model"])

    scenario = doc.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")

    grid_doc = doc.get("grid", {})
    if not isinstance(grid_doc, dict):
        raise ConfigError("grid must be an object")
    unknown = set(grid_doc) - _GRID_KEYS
    if unknown:
        raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
    n_nodes = grid_doc.get("n_nodes", 4096)
    if not isinstance(n_nodes, int) or isinstance(n_nodes, bool) or n_nodes < 16:
        raise ConfigError("grid.n_nodes must be an integer >= 16")
    L = grid_doc.get("L", "auto")
    if L == "auto":
        L = None
    elif not isinstance(L, (int, float)) or isinstance(L, bool) or L <= 0:
        raise ConfigError("grid.L must be a positive number or \"auto\"")
    else:
        L = float(L)
    grid = GridSpec(n_nodes=n_nodes, L=L)

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed must be a nonnegative integer")

    force = doc.get("force_regime")
    if force is not None and force not in ("Supersonic", "Subsonic", "Sonic"):
        raise ConfigError(f"force_regime must be a regime label, got {force!r}")

    evolve = {}
    if scenario == "evolve":
        if "evolve" not in doc:
            raise ConfigError("scenario evolve requires an evolve section")
        ev = doc["evolve"]
        if not isinstance(ev, dict):
            raise ConfigError("evolve must be an object")
        unknown = set(ev) - _EVOLVE_KEYS
        if unknown:
            raise ConfigError(f"unknown evolve keys: {sorted(unknown)}")
        evolve["t_end"] = _require_number(ev, "t_end", positive=True)
        evolve["report_every"] = _require_number(ev, "report_every", positive=True)
        evolve["snapshot"] = bool(ev.get("snapshot", True))
        pert = ev.get("perturbation")
        if pert is not None:
            if not isinstance(pert, dict):
                raise ConfigError("perturbation must be an object")
            unknown = set(pert) - _PERT_KEYS
            if unknown:
                raise ConfigError(f"unknown perturbation keys: {sorted(unknown)}")
        evolve["perturbation"] = pert
    elif "evolve" in doc:
        raise ConfigError("evolve section only valid for scenario evolve")

    sweep = {}
    if scenario == "sweep":
        if "sweep" not in doc:
            raise ConfigError("scenario sweep requires a sweep section")
        sw = doc["sweep"]
        if not isinstance(sw, dict):
            raise ConfigError("sweep must be an object")
        unknown = set(sw) - _SWEEP_KEYS
        if unknown:
            raise ConfigError(f"unknown sweep keys: {sorted(unknown)}")
        dl = sw.get("delta_list")
        if (not isinstance(dl, list) or not dl
                or not all(isinstance(d, (int, float)) and not isinstance(d, bool)
                           for d in dl)):
            raise ConfigError("sweep.delta_list must be a nonempty list of numbers")
        sweep["delta_list"] = [float(d) for d in dl]
    elif "sweep" in doc:
        raise ConfigError("sweep section only valid for scenario sweep")

    return RunConfig(params=params, far=far, scenario=scenario, grid=grid,
                     seed=seed, force_regime=force, evolve=evolve, sweep=sweep,
                     raw=doc)


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return parse_config(doc)
