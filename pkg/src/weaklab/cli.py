"""``weaklab run <config>`` and ``weaklab sweep <config> --param P --values a,b,c``.

Exit codes: 0 success, 1 malformed configuration, 2 parameter validation
failure, 3 I/O failure. Every output is computed before the first file is
written, so a failing run leaves nothing behind.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import replace

import numpy as np
import yaml

from . import config as cfgmod
from .config import ConfigError, RunConfig
from .plots import figure_for
from .scenarios import SCENARIOS, ScenarioReport
from .statkit import fmt

SEED_ENV = "WEAKLAB_SEED"
SWEEP_COLUMNS = ("value", "estimate", "std_error", "collapsed_count")


def _seed_override(cfg: RunConfig) -> RunConfig:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return cfg
    try:
        seed = int(raw, 10)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError(f"{SEED_ENV} must be an unsigned 64-bit integer")
    return replace(cfg, seed=seed)


def execute(cfg: RunConfig) -> ScenarioReport:
    kwargs = cfgmod.scenario_kwargs(cfg)
    return SCENARIOS[cfg.scenario](rng=np.random.default_rng(cfg.seed), **kwargs)


def render(cfg: RunConfig, report: ScenarioReport) -> dict[str, str]:
    """File name -> contents for one run."""
    head = f"seed: {cfg.seed}\n"
    files = {
        "report.txt": head + report.summary(),
        "report.yaml": yaml.safe_dump({"config": cfgmod.to_dict(cfg), "report": report.to_dict()},
                                      sort_keys=False),
    }
    for name, ledger in report.ledgers.items():
        files[f"ledger_{name}.csv"] = ledger.to_csv_text()
    if cfg.emit_plot:
        files["plot.svg"] = figure_for(report).to_string()
    return files


def _write_all(directory: str, files: dict[str, str]) -> None:
    os.makedirs(directory, exist_ok=True)
    for name, text in files.items():
        path = os.path.join(directory, name)
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)


def headline(report: ScenarioReport):
    key = report.headline
    if key is None and report.estimates:
        key = next(iter(report.estimates))
    if key is None or key not in report.estimates:
        return math.nan, math.nan
    e = report.estimates[key]
    return e.value, e.std_error


def run(config_path) -> int:
    cfg = _seed_override(cfgmod.load(config_path))
    report = execute(cfg)
    _write_all(cfg.output_dir, render(cfg, report))
    return 0


def parse_values(text: str) -> list:
    items = [s.strip() for s in text.split(",")]
    if not items or any(s == "" for s in items):
        raise ConfigError(f"--values must be a comma-separated list, got {text!r}")
    return [_scalar(s) for s in items]


def _scalar(s: str):
    for kind in (int, float):
        try:
            return kind(s)
        except ValueError:
            pass
    try:
        return yaml.safe_load(s)  # booleans and bare words
    except yaml.YAMLError:
        raise ConfigError(f"cannot read sweep value {s!r}") from None


def sweep(config_path, parameter: str, values: list) -> int:
    base = _seed_override(cfgmod.load(config_path))
    if parameter not in cfgmod.PARAMS[base.scenario]:
        raise ValueError(f"{base.scenario} has no parameter {parameter!r}")
    points = []
    for i, v in enumerate(values):
        try:
            cfg = cfgmod.with_param(base, parameter, v)
        except ConfigError as exc:
            raise ValueError(str(exc)) from None
        cfg = replace(cfg, seed=cfgmod.child_seed(base.seed, i),
                      output_dir=os.path.join(base.output_dir, f"point_{i:03d}"))
        report = execute(cfg)
        points.append((cfg, render(cfg, report), cfg.params[parameter], report))

    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(SWEEP_COLUMNS)
    for _, _, v, report in points:
        est, se = headline(report)
        w.writerow((fmt(v), fmt(est), fmt(se), str(int(report.collapsed_count))))
    for cfg, files, _, _ in points:
        _write_all(cfg.output_dir, files)
    _write_all(base.output_dir, {"sweep.csv": buf.getvalue()})
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="weaklab", description="Weak measurement simulations.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario from a YAML config")
    r.add_argument("config")
    s = sub.add_parser("sweep", help="rerun a scenario over a list of parameter values")
    s.add_argument("config")
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True, help="comma-separated list")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return run(args.config)
        return sweep(args.config, args.param, parse_values(args.values))
    except ConfigError as exc:
        print(f"weaklab: malformed config: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        print(f"weaklab: invalid parameter: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"weaklab: I/O error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
