"""A single photon bouncing through a weakly measured interferometer.

The source is replaced by a strong mirror-detector after emission. Each pass
the photon leaves the splitter, hits the weak mirror-detector(s), recombines
and either returns to the source mirror (and goes round again) or escapes
through a dark port.

Two readout disciplines:

``end_only``
    One persistent pointer on mirror R, never read until the last pass. After
    m passes the pointer, given the photon is still inside, is the coherent
    sum ``sum_k w_k g(x - k eps)`` with binomial weights ``w``; every
    expectation is evaluated exactly from that branch algebra.
``per_cycle``
    A fresh pointer per pass, read out and recorded each time. The strong
    source detection re-prepares the photon every pass, so the passes are
    independent; readings are those of the trajectory in which the photon
    keeps returning, and escapes are tallied.
"""
from __future__ import annotations

import math

import numpy as np

from ..hilbert import beam_splitter
from ..pointer import COLLAPSE_FIDELITY, overlap, readout_std
from ..statkit import Estimate, OutcomeLedger, estimate
from .common import ScenarioReport, as_generator, binomial_z, require

READOUT_POLICIES = ("end_only", "per_cycle")
CHUNK = 200_000


# -- end-only branch algebra ---------------------------------------------------

def _binomial_weights(t: float, m: int) -> np.ndarray:
    w = np.ones(1)
    for _ in range(m):
        w = np.convolve(w, [1.0 - t, t])
    return w


def end_only_trajectory(t: float, n_cycles: int, epsilon: float, sigma: float):
    """Exact survival probability and conditional pointer mean after each pass.

    Returns ``(survival, q_mean)`` arrays indexed by pass count ``m = 0..N``.
    The pointer after m passes is ``sum_k w_k g(x - k eps)``; with the
    Gaussian overlap kernel ``O_d = exp(-(d eps)^2 / 4 sigma^2)``,
    ``survival = w.O.w`` and ``<Q> = eps (k w).O.w / survival``.
    """
    survival = np.empty(n_cycles + 1)
    q = np.empty(n_cycles + 1)
    survival[0], q[0] = 1.0, 0.0
    w = np.ones(1)
    for m in range(1, n_cycles + 1):
        w = np.convolve(w, [1.0 - t, t])
        d = np.arange(-m, m + 1)
        ow = np.convolve(w, overlap(d * epsilon, sigma))[m:2 * m + 1]
        k = np.arange(m + 1)
        s = w @ ow
        survival[m] = s
        q[m] = epsilon * ((k * w) @ ow) / s
    return survival, q


def _pointer_profile(w: np.ndarray, epsilon: float, sigma: float, points: int = 1 << 15):
    centers = epsilon * np.arange(w.size)
    lo, hi = centers[0] - 12 * sigma, centers[-1] + 12 * sigma
    x = np.linspace(lo, hi, points)
    amp = np.zeros_like(x)
    for block in range(0, w.size, 256):
        c = centers[block:block + 256]
        amp += np.exp(-((x[:, None] - c[None, :]) ** 2) / (2 * sigma**2)) @ w[block:block + 256]
    return x, amp**2


def _sample_profile(x, dens, rng, size):
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2 * np.diff(x))])
    cdf /= cdf[-1]
    return np.interp(rng.random(size), cdf, x)


def _run_end_only(t, n_cycles, eps, sigma, gen, n_runs):
    survival, q = end_only_trajectory(t, n_cycles, eps, sigma)
    loss_rng, read_rng = gen.spawn(2)
    u = loss_rng.random(n_runs)
    alive = u < survival[-1]
    x, dens = _pointer_profile(_binomial_weights(t, n_cycles), eps, sigma)
    reads = _sample_profile(x, dens, read_rng, int(alive.sum()))
    total = n_cycles * eps
    ids = np.flatnonzero(alive)
    ledger = OutcomeLedger(ids, np.full(ids.size, n_cycles), reads, np.full(ids.size, total),
                           np.zeros(ids.size, dtype=bool), "fixed", eps, "pointer_R")
    m = np.arange(n_cycles + 1)
    report = ScenarioReport(
        name="run_cyclic",
        parameters={"t": t, "n_cycles": n_cycles, "sigma": sigma,
                    "readout_policy": "end_only", "epsilon": eps, "n_runs": n_runs},
        ledgers={"pointer_R": ledger},
        counts={"survived": int(alive.sum()), "escaped": int(n_runs - alive.sum())},
        launched=n_runs,
        trajectory={"cycle": m, "q_mean": q, "q_linear": m * t * eps, "survival": survival},
        truth={"transmission": t, "final_q": float(q[-1])},
    )
    if ledger.value.size >= 2:
        report.estimates["transmission"] = estimate(ledger)
        report.headline = "transmission"
    report.diagnostics.update({
        "readout_policy": "end_only (one persistent pointer)",
        "total_coupling": total,
        "final_q_branch_algebra": float(q[-1]),
        "survival_probability": float(survival[-1]),
        "survival_z": binomial_z(int(alive.sum()), n_runs, float(survival[-1])),
    })
    report.collapsed_count = report.counts["escaped"]
    return report


# -- per-cycle engine -------------------------------------------------------------

def return_probability(coefficients, detected, epsilon: float, sigma: float) -> float:
    """Probability that one pass ends back at the source mirror.

    Fresh pointers on the ``detected`` ports; ``P = sum_jk c_j c_k O_jk`` with
    ``O_jk`` the overlap of the pointer configurations of paths j and k.
    """
    c = np.asarray(coefficients, dtype=float)
    tag = np.zeros(c.size, dtype=bool)
    tag[list(detected)] = True
    differing = tag[:, None].astype(int) + tag[None, :].astype(int)
    np.fill_diagonal(differing, 0)
    o = overlap(epsilon, sigma) ** differing
    return float(c @ o @ c)


def _cycle_engine(name, coefficients, n_cycles, eps, sigma, detected, gen, params):
    c = np.asarray(coefficients, dtype=float)
    bs = beam_splitter(coefficients=c)
    n = c.size
    d = len(detected)
    readout_rng, detect_rng = gen.spawn(2)
    std = readout_std(sigma)
    cum = np.cumsum(c)
    cum /= cum[-1]
    root_c = bs.matrix[:, 0]

    vals, fids = [], []
    accepted = attempts = 0
    while accepted < n_cycles:
        u = readout_rng.random(CHUNK)
        path = np.minimum((u[:, None] > cum[None, :]).sum(axis=1), n - 1)
        hit = path[:, None] == np.asarray(detected)[None, :]
        x = eps * hit + std * readout_rng.standard_normal((CHUNK, d))
        # log amplitude weight of path j: sum over detectors on j of (2 x eps - eps^2)/2 sigma^2
        logw = np.zeros((CHUNK, n))
        logw[:, detected] = (2 * x * eps - eps**2) / (2 * sigma**2)
        logw -= logw.max(axis=1, keepdims=True)
        a = root_c[None, :] * np.exp(logw)
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        p_src = np.abs(a @ bs.matrix[:, 0]) ** 2
        back = detect_rng.random(CHUNK) < p_src
        # losses after the last needed return are never observed
        keep_idx = np.flatnonzero(back)[: n_cycles - accepted]
        last = keep_idx[-1] + 1 if accepted + keep_idx.size == n_cycles else CHUNK
        attempts += int(last)
        vals.append(x[keep_idx])
        fids.append(np.abs(a[keep_idx] @ root_c) ** 2)
        accepted += keep_idx.size

    x = np.concatenate(vals)
    flags = np.concatenate(fids) < COLLAPSE_FIDELITY
    escaped = attempts - n_cycles
    cyc = np.arange(n_cycles)
    zeros = np.zeros(n_cycles, dtype=int)
    ledgers, estimates, truth = {}, {}, {}
    for col, port in enumerate(detected):
        key = f"port_{port}"
        ledgers[key] = OutcomeLedger(zeros, cyc, x[:, col], np.full(n_cycles, eps),
                                     flags, "fixed", eps, key)
        estimates[key] = estimate(ledgers[key])
        truth[key] = float(c[port])
    undetected = [j for j in range(n) if j not in detected]
    if len(undetected) == 1:
        j = undetected[0]
        inferred = 1.0 - x.sum(axis=1) / eps
        se = float(np.std(inferred, ddof=1) / math.sqrt(n_cycles))
        estimates[f"port_{j}"] = Estimate(float(inferred.mean()), se, n_cycles)
        truth[f"port_{j}"] = float(c[j])
    else:
        total = x.sum(axis=1) / eps
        estimates["sum"] = Estimate(float(total.mean()),
                                    float(np.std(total, ddof=1) / math.sqrt(n_cycles)), n_cycles)
        truth["sum"] = 1.0

    p_ret = return_probability(c, detected, eps, sigma)
    p_loss = 1.0 - p_ret
    p_loss_hat = escaped / attempts
    report = ScenarioReport(
        name=name, parameters=params, ledgers=ledgers, estimates=estimates, truth=truth,
        counts={"source": n_cycles, "escaped": escaped}, launched=attempts,
        headline=f"port_{detected[0]}",
    )
    report.diagnostics.update({
        "readout_policy": "per_cycle (fresh pointer each pass)",
        "epsilon": eps,
        "detected_ports": list(detected),
        "loss_per_pass": p_loss,
        "loss_per_pass_observed": p_loss_hat,
        "escape_z": binomial_z(escaped, attempts, p_loss),
        "log_survival": n_cycles * math.log1p(-p_loss),
        "log_survival_observed": n_cycles * math.log1p(-p_loss_hat) if p_loss_hat < 1 else -math.inf,
        "survival_probability": math.exp(n_cycles * math.log1p(-p_loss)),
        "flagged_records": int(flags.sum()),
    })
    report.collapsed_count = escaped
    return report


def _check_common(n_cycles, sigma, epsilon):
    require(int(n_cycles) == n_cycles and n_cycles >= 1,
            f"n_cycles must be an integer >= 1, got {n_cycles}")
    require(sigma > 0, f"pointer width must be positive, got {sigma}")
    require(epsilon is None or epsilon > 0, f"epsilon must be positive, got {epsilon}")


def run_cyclic(t: float, n_cycles: int, sigma: float = 1.0, readout_policy: str = "end_only",
               rng=None, epsilon: float | None = None, n_runs: int = 10_000) -> ScenarioReport:
    """One photon, ``n_cycles`` passes, weak detector on mirror R.

    Per-pass coupling defaults to ``1 / n_cycles`` so the pointer moves by
    ``T`` in total. ``n_runs`` repeats the end-only experiment with fresh
    photons to sample the final pointer reading.
    """
    require(0.0 < t < 1.0, f"transmission must lie in (0, 1), got {t}")
    _check_common(n_cycles, sigma, epsilon)
    require(readout_policy in READOUT_POLICIES,
            f"readout_policy must be one of {READOUT_POLICIES}, got {readout_policy!r}")
    n_cycles = int(n_cycles)
    eps = 1.0 / n_cycles if epsilon is None else float(epsilon)
    gen = as_generator(rng)
    if readout_policy == "end_only":
        require(int(n_runs) == n_runs and n_runs >= 1, "n_runs must be a positive integer")
        return _run_end_only(t, n_cycles, eps, sigma, gen, int(n_runs))
    params = {"t": t, "n_cycles": n_cycles, "sigma": sigma,
              "readout_policy": readout_policy, "epsilon": eps}
    rep = _cycle_engine("run_cyclic", (t, 1.0 - t), n_cycles, eps, sigma, [0], gen, params)
    rep.truth["transmission"] = t
    rep.estimates["transmission"] = rep.estimates["port_0"]
    rep.headline = "transmission"
    return rep


def run_multiport(coefficients, n_cycles: int, sigma: float = 1.0, rng=None,
                  epsilon: float | None = None, detect_all: bool = False) -> ScenarioReport:
    """One photon cycling through an n-port splitter with weak mirror-detectors
    on n-1 outgoing paths; the last port is inferred from normalization.

    ``detect_all`` puts a detector on every path as a cross-check.
    """
    c = np.asarray(coefficients, dtype=float)
    require(c.ndim == 1 and c.size >= 2, "need at least two splitting coefficients")
    require(bool(np.all(c >= 0)), "splitting coefficients must be nonnegative")
    require(abs(c.sum() - 1.0) <= 1e-9, f"splitting coefficients sum to {c.sum()}, not 1")
    _check_common(n_cycles, sigma, epsilon)
    n_cycles = int(n_cycles)
    eps = 1.0 / n_cycles if epsilon is None else float(epsilon)
    detected = list(range(c.size)) if detect_all else list(range(c.size - 1))
    params = {"coefficients": c.tolist(), "n_cycles": n_cycles, "sigma": sigma,
              "epsilon": eps, "detect_all": bool(detect_all)}
    rep = _cycle_engine("run_multiport", c, n_cycles, eps, sigma, detected,
                        as_generator(rng), params)
    if detect_all:
        rep.warnings.append("a detector on every path makes n independent weak "
                            "measurements; they need not agree with each other")
    return rep
