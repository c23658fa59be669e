"""Reconstructing the ground-state density of an infinite well from weak
position readings on a single particle.

The unit well is cut into ``bins + 2`` cells of width ``1/(bins + 1)``
centred on ``x_k = k/(bins + 1)``; cells 0 and ``bins + 1`` hold the strong
edge detectors, every interior cell has a weak detector coupled to its
projector. Readings sweep the detectors in order; each reading partially
collapses the one persistent state.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import stats
from scipy.special import expit, logit

from ..pointer import readout_std
from ..statkit import Estimate, OutcomeLedger, estimate
from .common import ScenarioReport, as_generator, require

LONG_RUN_EPSILON = 2.0 / math.sqrt(1e8)


def ground_density(x):
    """|psi(x)|^2 for the lowest level of the unit infinite well."""
    x = np.asarray(x, dtype=float)
    return np.where((x >= 0) & (x <= 1), 2.0 * np.sin(np.pi * x) ** 2, 0.0)


def cell_probabilities(bins: int) -> tuple[np.ndarray, float]:
    dx = 1.0 / (bins + 1)
    x = np.arange(bins + 2) * dx
    p = ground_density(x) * dx
    return p / p.sum(), dx


def error_budget(bins: int, readings: int, epsilon: float, sigma: float) -> np.ndarray:
    """Predicted standard error of every interior density estimate for
    independent (non-collapsing) readings."""
    p, dx = cell_probabilities(bins)
    p = p[1:-1]
    var = (readout_std(sigma) ** 2 + epsilon**2 * p * (1 - p)) / epsilon**2
    return np.sqrt(var / readings) / dx


def run_well(bins: int = 99, readings_per_detector: int = 1000,
             epsilon: float = LONG_RUN_EPSILON, sigma: float = 1.0, rng=None) -> ScenarioReport:
    require(int(bins) == bins and bins >= 1, f"bins must be a positive integer, got {bins}")
    require(int(readings_per_detector) == readings_per_detector and readings_per_detector >= 2,
            "readings_per_detector must be an integer >= 2")
    require(epsilon > 0, f"epsilon must be positive, got {epsilon}")
    require(sigma > 0, f"pointer width must be positive, got {sigma}")
    bins, n_read = int(bins), int(readings_per_detector)
    gen = as_generator(rng)
    read_rng, edge_rng = gen.spawn(2)

    p0, dx = cell_probabilities(bins)
    root_p0 = np.sqrt(p0)
    p = p0.copy()
    std = readout_std(sigma)
    last = bins + 1
    values = np.empty((n_read, bins))
    restarts = 0
    fidelity = np.empty(n_read + 1)
    fidelity[0] = 1.0

    for r in range(n_read):
        if edge_rng.random() < p[0] + p[last]:
            restarts += 1
            p = p0.copy()
        u = read_rng.random(bins)
        z = read_rng.standard_normal(bins)
        for i in range(bins):
            k = i + 1
            pk = p[k]
            x = (epsilon if u[i] < pk else 0.0) + std * z[i]
            values[r, i] = x
            if not 0.0 < pk < 1.0:
                continue
            # squared amplitude ratio |g(x - eps) / g(x)|^2
            pk_new = expit(logit(pk) + (2 * x * epsilon - epsilon**2) / sigma**2)
            p *= (1.0 - pk_new) / (1.0 - pk)
            p[k] = pk_new
        p /= p.sum()
        fidelity[r + 1] = float(np.dot(np.sqrt(p), root_p0)) ** 2

    x_k = np.arange(1, bins + 1) * dx
    truth_density = ground_density(x_k)
    ledgers, estimates, truth = {}, {}, {}
    sweep_ids = np.arange(n_read)
    for i in range(bins):
        key = f"x{i + 1:02d}"
        led = OutcomeLedger(sweep_ids, np.full(n_read, i + 1), values[:, i],
                            np.full(n_read, epsilon), np.zeros(n_read, dtype=bool),
                            "fixed", epsilon, key)
        ledgers[key] = led
        e = estimate(led)
        estimates[key] = Estimate(e.value / dx, e.std_error / dx, e.n)
        truth[key] = float(truth_density[i])

    est = np.array([estimates[k].value for k in estimates])
    se = np.array([estimates[k].std_error for k in estimates])
    err = est - truth_density
    budget = error_budget(bins, n_read, epsilon, sigma)
    rmse_95 = float(np.sqrt(np.mean(budget**2) * stats.chi2.ppf(0.95, bins) / bins))
    peak = float(est.max())
    mid = (bins + 1) // 2
    report = ScenarioReport(
        name="run_well",
        parameters={"bins": bins, "readings_per_detector": n_read,
                    "epsilon": epsilon, "sigma": sigma},
        ledgers=ledgers, estimates=estimates, truth=truth,
        trajectory={"x": x_k, "density": est, "std_error": se, "truth": truth_density,
                    "fidelity": fidelity},
        headline=f"x{mid:02d}",
    )
    report.diagnostics.update({
        "epsilon": epsilon,
        "long_run_epsilon": LONG_RUN_EPSILON,
        "rmse": float(np.sqrt(np.mean(err**2))),
        "rmse_budget_95": rmse_95,
        "mean_signed_error": float(err.mean()),
        "mean_signed_error_se": float(np.sqrt(np.sum(se**2)) / bins),
        "argmax_x": float(x_k[int(np.argmax(est))]),
        "edge_ratio_low": float(est[0] / peak) if peak > 0 else math.nan,
        "edge_ratio_high": float(est[-1] / peak) if peak > 0 else math.nan,
        "sum_probability": float(np.sum(est) * dx),
        "sum_probability_se": float(np.sqrt(np.sum(se**2)) * dx),
        "final_infidelity": float(1.0 - fidelity[-1]),
        "max_infidelity": float(1.0 - fidelity.min()),
        "edge_restarts": restarts,
    })
    report.collapsed_count = restarts
    return report
