"""Strict run configuration (YAML) and the seed-derivation rule.

A document looks like::

    scenario: run_well
    seed: 42
    output_dir: out/well
    emit_plot: true
    params:
      bins: 99
      readings_per_detector: 1000
      epsilon: 0.02

Unknown keys anywhere are rejected. Parameter keys are the scenario
function's argument names; the Michelson coupling is given as ``mode``
(``fixed`` or ``scaled``) plus ``epsilon`` or ``lam`` respectively.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Any

import yaml

from .scenarios import SCENARIOS, Coupling

REQUIRED = object()
TOP_KEYS = ("scenario", "seed", "output_dir", "emit_plot", "params")

_COUPLED = {"t": (float, REQUIRED), "n": (int, REQUIRED), "mode": (str, REQUIRED),
            "epsilon": (float, None), "lam": (float, None), "sigma": (float, 1.0)}

PARAMS: dict[str, dict[str, tuple[type, Any]]] = {
    "run_michelson_weak": {**_COUPLED, "delayed_choice": (str, "keep_bs"),
                           "record": (bool, True)},
    "run_transmission_delayed_choice": {**_COUPLED, "keep_probability": (float, 0.5),
                                        "record": (bool, True)},
    "run_spin_sequence": {"alpha": (float, REQUIRED), "beta": (float, REQUIRED),
                          "m": (int, REQUIRED), "lam": (float, REQUIRED),
                          "sigma": (float, 1.0)},
    "run_cyclic": {"t": (float, REQUIRED), "n_cycles": (int, REQUIRED),
                   "sigma": (float, 1.0), "readout_policy": (str, "end_only"),
                   "epsilon": (float, None), "n_runs": (int, 10_000)},
    "run_multiport": {"coefficients": (list, REQUIRED), "n_cycles": (int, REQUIRED),
                      "sigma": (float, 1.0), "epsilon": (float, None),
                      "detect_all": (bool, False)},
    "run_well": {"bins": (int, 99), "readings_per_detector": (int, 1000),
                 "epsilon": (float, 2e-4), "sigma": (float, 1.0)},
}


class ConfigError(ValueError):
    """The document is malformed (syntax, unknown or missing keys, types)."""


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    seed: int
    output_dir: str
    params: dict = field(default_factory=dict)
    emit_plot: bool = False


def _coerce(key: str, kind: type, value):
    if value is None:
        return None
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"parameter {key!r} must be true or false")
        return value
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"parameter {key!r} must be an integer, got {value!r}")
        return int(value)
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"parameter {key!r} must be a number, got {value!r}")
        return float(value)
    if kind is list:
        if not isinstance(value, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"parameter {key!r} must be a list of numbers")
        return [float(v) for v in value]
    if not isinstance(value, str):
        raise ConfigError(f"parameter {key!r} must be a string, got {value!r}")
    return value


def coerce_param(scenario: str, key: str, value):
    table = PARAMS[scenario]
    if key not in table:
        raise ConfigError(f"unknown parameter {key!r} for {scenario}; "
                          f"known: {', '.join(table)}")
    return _coerce(key, table[key][0], value)


def from_dict(doc) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    unknown = set(doc) - set(TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(sorted(map(str, unknown)))}")
    for key in ("scenario", "seed", "output_dir"):
        if key not in doc:
            raise ConfigError(f"missing required key {key!r}")
    scenario = doc["scenario"]
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; known: {', '.join(SCENARIOS)}")
    seed = doc["seed"]
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if not isinstance(doc["output_dir"], str):
        raise ConfigError("output_dir must be a string")
    emit = doc.get("emit_plot", False)
    if not isinstance(emit, bool):
        raise ConfigError("emit_plot must be true or false")
    raw = doc.get("params") or {}
    if not isinstance(raw, dict):
        raise ConfigError("params must be a mapping")
    params = {str(k): coerce_param(scenario, str(k), v) for k, v in raw.items()}
    for key, (_, default) in PARAMS[scenario].items():
        if default is REQUIRED and key not in params:
            raise ConfigError(f"{scenario} needs parameter {key!r}")
    return RunConfig(scenario, seed, doc["output_dir"], params, emit)


def parse(text: str) -> RunConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}".splitlines()[0]) from None
    return from_dict(doc)


def load(path) -> RunConfig:
    with open(path) as fh:
        text = fh.read()
    return parse(text)


def to_dict(cfg: RunConfig) -> dict:
    return {"scenario": cfg.scenario, "seed": cfg.seed, "output_dir": cfg.output_dir,
            "emit_plot": cfg.emit_plot, "params": dict(cfg.params)}


def dump(cfg: RunConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)


def with_param(cfg: RunConfig, key: str, value) -> RunConfig:
    params = dict(cfg.params)
    params[key] = coerce_param(cfg.scenario, key, value)
    return replace(cfg, params=params)


def scenario_kwargs(cfg: RunConfig) -> dict:
    """Keyword arguments for the scenario function (defaults filled in)."""
    table = PARAMS[cfg.scenario]
    kw = {k: cfg.params.get(k, default) for k, (_, default) in table.items()}
    if "mode" in table:
        mode = kw.pop("mode")
        eps, lam = kw.pop("epsilon"), kw.pop("lam")
        if mode == "fixed":
            if eps is None or lam is not None:
                raise ValueError("fixed mode needs 'epsilon' (and no 'lam')")
            kw["mode"] = Coupling("fixed", eps)
        elif mode == "scaled":
            if lam is None or eps is not None:
                raise ValueError("scaled mode needs 'lam' (and no 'epsilon')")
            kw["mode"] = Coupling("scaled", lam)
        else:
            raise ValueError(f"mode must be 'fixed' or 'scaled', got {mode!r}")
    return kw


def child_seed(master: int, index: int) -> int:
    """First 8 bytes (big-endian) of SHA-256 over ``"<master>:<index>"``."""
    digest = hashlib.sha256(f"{master}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")
