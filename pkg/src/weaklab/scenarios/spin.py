"""Three strong spin measurements (alpha, beta, alpha) with a weak alpha/beta
pair in each of the two intervals between them."""
from __future__ import annotations

import math

import numpy as np

from ..hilbert import pauli, planar_axis, spin_state
from ..pointer import COLLAPSE_FIDELITY, weak_readout_batch
from ..statkit import OutcomeLedger, estimate
from ..tsvf import TwoStateVector, strong_measure_batch, weak_value
from .common import ScenarioReport, as_generator, require


def _sign(s: int) -> str:
    return "+" if s > 0 else "-"


def run_spin_sequence(alpha: float, beta: float, m: int, lam: float, rng=None,
                      sigma: float = 1.0, initial_axis=(0.0, 1.0, 0.0)) -> ScenarioReport:
    """Strong alpha at t1, weak (alpha, beta), strong beta at t2, weak
    (alpha, beta), strong alpha at t3, for ``m`` independent particles.

    Angles are measured from z in the x-z plane. Weak couplings use
    ``epsilon = lam / sqrt(m)``. Particles start in the eigenstate of
    ``initial_axis`` (default y, unbiased for any in-plane alpha).

    Readings are grouped by the strong outcomes bracketing each interval and
    compared with the exact weak values of those pre/post pairs.
    """
    require(int(m) == m and m >= 2, f"trial count must be an integer >= 2, got {m}")
    require(lam > 0, f"weak coupling lam must be positive, got {lam}")
    require(sigma > 0, f"pointer width must be positive, got {sigma}")
    require(abs(math.sin(alpha - beta)) > 1e-9, "alpha and beta must differ modulo pi")
    m = int(m)
    eps = lam / math.sqrt(m)
    gen = as_generator(rng)
    strong_rng, weak_rng = gen.spawn(2)
    ax_a, ax_b = planar_axis(alpha), planar_axis(beta)
    sa, sb = pauli(ax_a), pauli(ax_b)

    states = np.broadcast_to(spin_state(initial_axis, +1).amps, (m, 2)).copy()
    s1, states = strong_measure_batch(states, sa, strong_rng)
    xa1, states, fa1 = weak_readout_batch(states, sa, eps, sigma, weak_rng)
    xb1, states, fb1 = weak_readout_batch(states, sb, eps, sigma, weak_rng)
    s2, states = strong_measure_batch(states, sb, strong_rng)
    xa2, states, fa2 = weak_readout_batch(states, sa, eps, sigma, weak_rng)
    xb2, states, fb2 = weak_readout_batch(states, sb, eps, sigma, weak_rng)
    s3, states = strong_measure_batch(states, sa, strong_rng)
    s1, s2, s3 = (np.rint(s).astype(int) for s in (s1, s2, s3))

    ids = np.arange(m)
    ledgers = {}
    for name, x, f, interval in (("alpha_1", xa1, fa1, 1), ("beta_1", xb1, fb1, 1),
                                 ("alpha_2", xa2, fa2, 2), ("beta_2", xb2, fb2, 2)):
        ledgers[name] = OutcomeLedger(ids, np.full(m, interval), x, np.full(m, eps),
                                      f < COLLAPSE_FIDELITY, "scaled", lam, name)

    counts = {}
    for a in (1, -1):
        for b in (1, -1):
            for c in (1, -1):
                counts[f"{_sign(a)}{_sign(b)}{_sign(c)}"] = int(
                    np.sum((s1 == a) & (s2 == b) & (s3 == c)))
    report = ScenarioReport(
        name="run_spin_sequence",
        parameters={"alpha": alpha, "beta": beta, "m": m, "lam": lam, "sigma": sigma},
        ledgers=ledgers, counts=counts, launched=m,
    )

    brackets = {1: (s1, ax_a, s2, ax_b), 2: (s2, ax_b, s3, ax_a)}
    for interval, (pre_s, pre_ax, post_s, post_ax) in brackets.items():
        for a in (1, -1):
            for b in (1, -1):
                mask = (pre_s == a) & (post_s == b)
                if mask.sum() < 2:
                    continue
                tsv = TwoStateVector(spin_state(pre_ax, a), spin_state(post_ax, b))
                for op_name, op in (("alpha", sa), ("beta", sb)):
                    key = f"{op_name}_{interval}[{_sign(a)},{_sign(b)}]"
                    report.estimates[key] = estimate(ledgers[f"{op_name}_{interval}"].select(mask))
                    report.truth[key] = weak_value(op, tsv).real
    report.diagnostics["epsilon"] = eps
    report.diagnostics["flagged_records"] = sum(l.n_collapsed for l in ledgers.values())
    report.collapsed_count = report.diagnostics["flagged_records"]
    return report
