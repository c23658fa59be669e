"""Headline figure for each scenario report."""
from __future__ import annotations

import numpy as np

from .scenarios import ScenarioReport
from .svg import Figure


def _padded(lo, hi, frac=0.08):
    span = hi - lo if hi > lo else 1.0
    return lo - frac * span, hi + frac * span


def well_figure(report: ScenarioReport) -> Figure:
    tr = report.trajectory
    x, dens, truth = tr["x"], tr["density"], tr["truth"]
    lo = min(0.0, float(dens.min()))
    fig = Figure((0.0, 1.0), _padded(lo, max(float(dens.max()), 2.0)),
                 title=f"density from {report.parameters['readings_per_detector']} readings "
                       f"per detector (epsilon = {report.parameters['epsilon']:g})",
                 xlabel="x / L", ylabel="|psi(x)|^2")
    fig.bars(x, dens, width=0.8 * (x[1] - x[0]) if x.size > 1 else 0.01)
    grid = np.linspace(0, 1, 201)
    fig.polyline(grid, 2 * np.sin(np.pi * grid) ** 2)
    return fig


def trajectory_figure(report: ScenarioReport) -> Figure:
    tr = report.trajectory
    m, q = tr["cycle"], tr["q_mean"]
    fig = Figure((0.0, float(m[-1])), _padded(0.0, max(float(q.max()), 1e-12)),
                 title="pointer expectation along the passes",
                 xlabel="pass m", ylabel="<Q_d>")
    fig.polyline(m, tr["q_linear"], stroke="#999999", width=1.0)
    fig.polyline(m, q)
    return fig


def estimate_figure(report: ScenarioReport) -> Figure:
    keys = [k for k in report.estimates if k in report.truth]
    est = np.array([report.estimates[k].value for k in keys])
    se = np.array([report.estimates[k].std_error for k in keys])
    tru = np.array([report.truth[k] for k in keys])
    allv = np.concatenate([est - se, est + se, tru, [0.0]])
    fig = Figure((-0.5, len(keys) - 0.5), _padded(float(allv.min()), float(allv.max())),
                 title=f"{report.name}: estimate vs truth", ylabel="value")
    idx = np.arange(len(keys))
    fig.bars(idx, est, width=0.6)
    fig.markers(idx, tru)
    for i, k in enumerate(keys):
        fig.text(fig.px(i), fig.height - fig.margin + 32, k, size=9)
    return fig


def figure_for(report: ScenarioReport) -> Figure:
    if report.name == "run_well":
        return well_figure(report)
    if report.name == "run_cyclic" and "q_mean" in report.trajectory:
        return trajectory_figure(report)
    return estimate_figure(report)
