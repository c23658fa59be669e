from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..statkit import Estimate, OutcomeLedger


@dataclass(frozen=True)
class Coupling:
    """Coupling-strength regime.

    ``fixed``: every reading uses ``epsilon = strength``.
    ``scaled``: ``epsilon = strength / sqrt(N)`` (``strength`` is lambda), so
    the total disturbance over N readings stays fixed.
    """

    mode: str
    strength: float

    def __post_init__(self):
        if self.mode not in ("fixed", "scaled"):
            raise ValueError(f"coupling mode must be 'fixed' or 'scaled', got {self.mode!r}")
        if not (self.strength >= 0 and math.isfinite(self.strength)):
            raise ValueError(f"coupling strength must be a nonnegative number, got {self.strength}")

    def epsilon(self, n: int) -> float:
        if self.mode == "fixed":
            return float(self.strength)
        return float(self.strength) / math.sqrt(n)

    def label(self) -> str:
        sym = "epsilon" if self.mode == "fixed" else "lambda"
        return f"{self.mode} ({sym} = {self.strength:g})"


def fixed(epsilon: float) -> Coupling:
    return Coupling("fixed", float(epsilon))


def scaled(lam: float) -> Coupling:
    return Coupling("scaled", float(lam))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


@dataclass
class ScenarioReport:
    """Structured outcome of one scenario run.

    ``counts`` holds exit-port (or outcome) tallies; when ``launched`` is set
    they must add up to it.
    """

    name: str
    parameters: dict[str, Any]
    ledgers: dict[str, OutcomeLedger] = field(default_factory=dict)
    estimates: dict[str, Estimate] = field(default_factory=dict)
    truth: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    launched: int | None = None
    trajectory: dict[str, np.ndarray] = field(default_factory=dict)
    diagnostics: dict[str, Any] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    headline: str | None = None
    collapsed_count: int = 0

    def __post_init__(self):
        if self.launched is not None and sum(self.counts.values()) != self.launched:
            raise ValueError(f"{self.name}: exit counts {self.counts} do not add up "
                             f"to {self.launched} launched")
        for k, e in self.estimates.items():
            if not isinstance(e, Estimate):
                raise TypeError(f"estimate {k!r} carries no standard error")

    def headline_estimate(self) -> Estimate:
        if self.headline is None:
            raise KeyError(f"{self.name} has no headline estimate")
        return self.estimates[self.headline]

    def to_dict(self) -> dict[str, Any]:
        """Plain-python rendering (ledgers summarized, not inlined)."""
        return {
            "scenario": self.name,
            "parameters": _plain(self.parameters),
            "launched": self.launched,
            "counts": {k: int(v) for k, v in self.counts.items()},
            "estimates": {k: {"value": float(e.value), "std_error": float(e.std_error),
                              "n": int(e.n)} for k, e in self.estimates.items()},
            "truth": {k: float(v) for k, v in self.truth.items()},
            "headline": self.headline,
            "collapsed_count": int(self.collapsed_count),
            "ledgers": {k: len(v) for k, v in self.ledgers.items()},
            "diagnostics": _plain(self.diagnostics),
            "warnings": list(self.warnings),
        }

    def summary(self) -> str:
        lines = [f"scenario: {self.name}"]
        for k, v in self.parameters.items():
            lines.append(f"  {k} = {v}")
        if self.counts:
            total = sum(self.counts.values())
            lines.append("counts:")
            for k, v in self.counts.items():
                share = 100.0 * v / total if total else float("nan")
                lines.append(f"  {k:<16} {v:>12d}  ({share:.4f}%)")
        if self.estimates:
            lines.append("estimates (value +- std_error | truth):")
            for k, e in self.estimates.items():
                t = self.truth.get(k)
                ts = f" | {t:.6g}" if t is not None else ""
                lines.append(f"  {k:<16} {e.value:.6g} +- {e.std_error:.3g}{ts}")
        if self.diagnostics:
            lines.append("diagnostics:")
            for k, v in self.diagnostics.items():
                lines.append(f"  {k} = {_short(v)}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines) + "\n"


def _short(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 8:
        return f"[{len(v)} values]"
    return v


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, Coupling):
        return {"mode": obj.mode, "strength": obj.strength}
    return obj


def binomial_z(count: int, trials: int, p: float) -> float:
    """Standardized deviation of a binomial count from its expectation."""
    sd = math.sqrt(trials * p * (1.0 - p))
    diff = count - trials * p
    if sd == 0.0:
        return 0.0 if diff == 0 else math.inf
    return diff / sd
