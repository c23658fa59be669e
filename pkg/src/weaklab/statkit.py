"""Aggregation of individually recorded readouts.

Every reading is kept (never summed on the device), so the same ledger can be
re-grouped after the fact: estimated as a whole, randomly sliced, or filtered.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .pointer import ReadoutRecord

CSV_COLUMNS = ("trial_id", "cycle_id", "value", "epsilon", "collapsed_flag")
COUPLING_MODES = ("fixed", "scaled")


class Estimate(NamedTuple):
    value: float
    std_error: float
    n: int = 0


def fmt(v: float) -> str:
    """Decimal rendering used in every CSV this package writes."""
    return format(float(v), ".12g")


@dataclass(frozen=True, eq=False)
class OutcomeLedger:
    """Columnar store of readout records for one detector."""

    trial_id: np.ndarray
    cycle_id: np.ndarray
    value: np.ndarray
    epsilon: np.ndarray
    collapsed: np.ndarray
    coupling_mode: str = "fixed"
    epsilon_or_lambda: float = float("nan")
    detector: str = ""

    def __post_init__(self):
        cols = {
            "trial_id": np.asarray(self.trial_id, dtype=np.int64),
            "cycle_id": np.asarray(self.cycle_id, dtype=np.int64),
            "value": np.asarray(self.value, dtype=float),
            "epsilon": np.asarray(self.epsilon, dtype=float),
            "collapsed": np.asarray(self.collapsed, dtype=bool),
        }
        n = cols["value"].shape[0]
        if cols["epsilon"].ndim == 0:
            cols["epsilon"] = np.full(n, float(cols["epsilon"]))
        for name, arr in cols.items():
            if arr.shape != (n,):
                raise ValueError(f"ledger column {name!r} has shape {arr.shape}, expected ({n},)")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.coupling_mode not in COUPLING_MODES:
            raise ValueError(f"coupling mode must be one of {COUPLING_MODES}")
        if n and np.any(np.diff(cols["trial_id"]) < 0):
            raise ValueError("ledger trial ids must be nondecreasing")
        if n and not np.all(cols["epsilon"] > 0):
            raise ValueError("ledger records need positive coupling strengths")

    @classmethod
    def from_records(cls, records: Iterable[ReadoutRecord], coupling_mode: str = "fixed",
                     epsilon_or_lambda: float = float("nan"), detector: str = "") -> "OutcomeLedger":
        recs = list(records)
        return cls(
            [r.trial_id for r in recs], [r.cycle_id for r in recs],
            [r.value for r in recs], [r.epsilon for r in recs],
            [r.collapsed_flag for r in recs], coupling_mode, epsilon_or_lambda, detector,
        )

    @classmethod
    def empty(cls, coupling_mode="fixed", epsilon_or_lambda=float("nan"), detector=""):
        return cls([], [], [], [], [], coupling_mode, epsilon_or_lambda, detector)

    def __len__(self) -> int:
        return self.value.shape[0]

    @property
    def records(self) -> list[ReadoutRecord]:
        return [ReadoutRecord(float(v), float(e), bool(c), int(t), int(k))
                for t, k, v, e, c in zip(self.trial_id, self.cycle_id, self.value,
                                         self.epsilon, self.collapsed)]

    @property
    def signal(self) -> np.ndarray:
        """Readings divided by their coupling strength."""
        return self.value / self.epsilon

    @property
    def n_collapsed(self) -> int:
        return int(self.collapsed.sum())

    def select(self, mask_or_index) -> "OutcomeLedger":
        idx = np.asarray(mask_or_index)
        if idx.dtype != bool:
            idx = np.sort(idx)
        return OutcomeLedger(self.trial_id[idx], self.cycle_id[idx], self.value[idx],
                             self.epsilon[idx], self.collapsed[idx], self.coupling_mode,
                             self.epsilon_or_lambda, self.detector)

    # -- CSV ---------------------------------------------------------------

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(CSV_COLUMNS)
        w.writerows(
            (str(t), str(k), fmt(v), fmt(e), "1" if c else "0")
            for t, k, v, e, c in zip(self.trial_id.tolist(), self.cycle_id.tolist(),
                                     self.value.tolist(), self.epsilon.tolist(),
                                     self.collapsed.tolist())
        )
        return buf.getvalue()

    def to_csv(self, path) -> None:
        """Write atomically: a temp file in the same directory, then rename."""
        path = os.fspath(path)
        tmp = path + ".tmp"
        with open(tmp, "w", newline="") as fh:
            fh.write(self.to_csv_text())
        os.replace(tmp, path)

    @classmethod
    def from_csv(cls, path, coupling_mode="fixed", epsilon_or_lambda=float("nan"),
                 detector="") -> "OutcomeLedger":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or tuple(rows[0]) != CSV_COLUMNS:
            raise ValueError(f"{path}: not a ledger CSV (header {rows[:1]})")
        body = rows[1:]
        return cls(
            [int(r[0]) for r in body], [int(r[1]) for r in body],
            [float(r[2]) for r in body], [float(r[3]) for r in body],
            [r[4] == "1" for r in body], coupling_mode, epsilon_or_lambda, detector,
        )


def _estimate(y: np.ndarray) -> Estimate:
    n = y.size
    mean = float(np.mean(y))
    se = float(np.std(y, ddof=1) / np.sqrt(n)) if n > 1 else float("nan")
    return Estimate(mean, se, n)


def estimate(ledger: OutcomeLedger) -> Estimate:
    """Mean of ``value / epsilon`` and its standard error."""
    if len(ledger) == 0:
        raise ValueError("empty ledger")
    if len(ledger) < 2:
        raise ValueError("need at least two records for a standard error")
    return _estimate(ledger.signal)


@dataclass
class SliceResult:
    estimates: list[Estimate]
    sizes: list[int]
    full: Estimate
    without_collapsed: Estimate
    n_collapsed: int
    groups: list[np.ndarray] = field(repr=False, default_factory=list)

    def weighted_mean(self) -> float:
        sizes = np.asarray(self.sizes, dtype=float)
        return float(np.dot(sizes, [e.value for e in self.estimates]) / sizes.sum())


def slice(ledger: OutcomeLedger, groups: int, rng: np.random.Generator) -> SliceResult:
    """Randomly partition the ledger into ``groups`` near-equal parts and
    estimate each; also re-estimate with every collapse-flagged record removed."""
    n = len(ledger)
    if groups < 1:
        raise ValueError("need at least one group")
    if groups > n:
        raise ValueError(f"cannot split {n} records into {groups} groups")
    y = ledger.signal
    # sorted groups keep the original summation order (k = 1 reproduces the full estimate bit for bit)
    parts = [np.sort(p) for p in np.array_split(rng.permutation(n), groups)]
    ests = [_estimate(y[p]) for p in parts]
    keep = ~ledger.collapsed
    if keep.sum() >= 2:
        without = _estimate(y[keep])
    else:
        without = Estimate(float("nan"), float("nan"), int(keep.sum()))
    return SliceResult(ests, [len(p) for p in parts], _estimate(y), without,
                       ledger.n_collapsed, parts)


def scaling_exponent(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(std_error) against log(N)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (N, std_error) points")
    if np.any(~np.isfinite(pts)) or np.any(pts <= 0):
        raise ValueError("scaling points must be positive")
    if pts[:, 0].max() / pts[:, 0].min() < 100.0 * (1 - 1e-12):
        raise ValueError("scaling points must span at least two decades of N")
    slope, _ = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)
    return float(slope)


class RunningMoments:
    """Streaming mean/variance (pairwise merge of batch moments).

    Used where the readings themselves are too many to keep.
    """

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self.m2 = 0.0

    def update(self, batch) -> None:
        y = np.asarray(batch, dtype=float)
        nb = y.size
        if nb == 0:
            return
        mb = float(y.mean())
        m2b = float(np.sum((y - mb) ** 2))
        n = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self.m2 += m2b + delta**2 * self.n * nb / n
        self.n = n

    def estimate(self) -> Estimate:
        if self.n < 2:
            raise ValueError("need at least two samples")
        return Estimate(self.mean, float(np.sqrt(self.m2 / (self.n - 1) / self.n)), self.n)
