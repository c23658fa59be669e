"""Michelson interferometer with one weakly coupled arm mirror.

Per photon: the beam splitter prepares ``sqrt(T)|R> + sqrt(1-T)|L>``, the R
mirror couples ``|R><R|`` to a fresh pointer which is read out and recorded,
and then either the photon recombines at the beam splitter (source port vs
dark port) or the beam splitter is gone and the two lower detectors make a
strong which-path measurement.
"""
from __future__ import annotations

import math

import numpy as np

from ..hilbert import PureState, beam_splitter, projector
from ..pointer import COLLAPSE_FIDELITY, couple, sample_readouts, wrong_port_probability
from ..statkit import Estimate, OutcomeLedger, RunningMoments
from .common import Coupling, ScenarioReport, as_generator, binomial_z, require

PATHS = ("R", "L")
DELAYED_CHOICES = ("keep_bs", "remove_bs")
CHUNK = 1_000_000


def path_state(t: float) -> PureState:
    """Photon state after the beam splitter, basis ``(R, L)``."""
    bs = beam_splitter(t)
    return bs.apply(PureState.basis(PATHS, "R"))


class _Subset:
    """Readings of one detector subset, kept whole or only as moments."""

    def __init__(self, record: bool):
        self.record = record
        self.moments = RunningMoments()
        self.parts: list[tuple[np.ndarray, ...]] = []
        self.flagged = 0

    def add(self, ids, x, eps, flags):
        if x.size == 0:
            return
        self.moments.update(x / eps)
        self.flagged += int(flags.sum())
        if self.record:
            self.parts.append((ids, x, flags))

    def ledger(self, eps, mode: Coupling, name: str) -> OutcomeLedger | None:
        if not self.record:
            return None
        if not self.parts:
            return OutcomeLedger.empty(mode.mode, mode.strength, name)
        ids, x, flags = (np.concatenate(c) for c in zip(*self.parts))
        return OutcomeLedger(ids, np.zeros(ids.size, dtype=int), x, np.full(x.size, eps),
                             flags, mode.mode, mode.strength, name)

    def estimate(self) -> Estimate | None:
        return self.moments.estimate() if self.moments.n >= 2 else None


def _validate(t, n, mode, sigma):
    require(0.0 < t < 1.0, f"transmission must lie in (0, 1), got {t}")
    require(int(n) == n and n >= 1, f"photon number must be a positive integer, got {n}")
    require(isinstance(mode, Coupling), "mode must be a Coupling (fixed or scaled)")
    require(sigma > 0, f"pointer width must be positive, got {sigma}")


def _simulate(name, t, n, mode, sigma, keep_probability, rng, record, chunk):
    _validate(t, n, mode, sigma)
    n = int(n)
    eps = mode.epsilon(n)
    gen = as_generator(rng)
    readout_rng, detect_rng, choice_rng = gen.spawn(3)
    psi = path_state(t)
    bs = beam_splitter(t)
    joint = couple(psi, projector("R", PATHS), eps, sigma) if eps > 0 else None

    counts = {"source": 0, "dark": 0, "R": 0, "L": 0}
    all_, keep_s, rem_s = _Subset(record), _Subset(record), _Subset(record)
    strong_r, strong_l = RunningMoments(), RunningMoments()

    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        ids = np.arange(start, start + m)
        if joint is not None:
            x, after, fid = sample_readouts(joint, readout_rng, m)
            flags = fid < COLLAPSE_FIDELITY
        else:
            x, flags = np.empty(0), np.empty(0, dtype=bool)
            after = np.broadcast_to(psi.amps, (m, 2))
        keep = choice_rng.random(m) < keep_probability
        u = detect_rng.random(m)

        # the returning photon meets the splitter reversed: out = U^T a, row form
        out = after @ bs.matrix
        dark = keep & (u < np.abs(out[:, 1]) ** 2)
        went_r = ~keep & (u < np.abs(after[:, 0]) ** 2)
        n_keep = int(keep.sum())
        counts["dark"] += int(dark.sum())
        counts["source"] += n_keep - int(dark.sum())
        counts["R"] += int(went_r.sum())
        counts["L"] += (m - n_keep) - int(went_r.sum())

        if joint is not None:
            all_.add(ids, x, eps, flags)
            keep_s.add(ids[keep], x[keep], eps, flags[keep])
            rem_s.add(ids[~keep], x[~keep], eps, flags[~keep])
            strong_r.update(x[went_r] / eps)
            strong_l.update(x[~keep & ~went_r] / eps)

    p_dark = wrong_port_probability(eps, sigma, t)
    n_keep_total = counts["source"] + counts["dark"]
    n_remove_total = counts["R"] + counts["L"]
    if keep_probability >= 1.0:
        counts = {"source": counts["source"], "dark": counts["dark"]}
    elif keep_probability <= 0.0:
        counts = {"R": counts["R"], "L": counts["L"]}

    report = ScenarioReport(
        name=name,
        parameters={"t": t, "n": n, "mode": mode.mode, "strength": mode.strength,
                    "sigma": sigma, "keep_probability": keep_probability},
        counts=counts, launched=n,
        truth={"transmission": t},
    )
    diag = report.diagnostics
    diag["coupling"] = mode.label()
    diag["epsilon"] = eps
    diag["dark_port_probability"] = p_dark
    if n_keep_total:
        dark = report.counts.get("dark", 0)
        diag["dark_port_expected"] = n_keep_total * p_dark
        diag["dark_port_z"] = binomial_z(dark, n_keep_total, p_dark)
        diag["source_return_fraction"] = 1.0 - dark / n_keep_total
    if n_remove_total:
        r = report.counts["R"]
        f = r / n_remove_total
        report.estimates["strong_which_path_R"] = Estimate(
            f, math.sqrt(max(f * (1 - f), 1e-300) / n_remove_total), n_remove_total)
        report.truth["strong_which_path_R"] = t
        diag["which_path_z"] = binomial_z(r, n_remove_total, t)

    if joint is None:
        report.warnings.append("epsilon = 0: no weak measurement, nothing recorded")
        return report

    report.estimates["transmission"] = all_.estimate()
    report.headline = "transmission"
    for key, sub in (("keep", keep_s), ("remove", rem_s)):
        e = sub.estimate()
        if e is not None and 0 < e.n < n:
            report.estimates[f"transmission_{key}"] = e
            report.truth[f"transmission_{key}"] = t
    for key, mom, truth in (("weak_given_R", strong_r, 1.0), ("weak_given_L", strong_l, 0.0)):
        if mom.n >= 2:
            report.estimates[key] = mom.estimate()
            report.truth[key] = truth
    if "transmission_keep" in report.estimates and "transmission_remove" in report.estimates:
        a, b = report.estimates["transmission_keep"], report.estimates["transmission_remove"]
        diag["keep_remove_z"] = (a.value - b.value) / math.hypot(a.std_error, b.std_error)
    diag["flagged_records"] = all_.flagged
    report.collapsed_count = report.counts.get("dark", 0) if n_keep_total else all_.flagged

    led = all_.ledger(eps, mode, "mirror_R")
    if led is not None:
        report.ledgers["mirror_R"] = led
        if 0 < n_keep_total < n:
            report.ledgers["mirror_R_keep"] = keep_s.ledger(eps, mode, "mirror_R_keep")
            report.ledgers["mirror_R_remove"] = rem_s.ledger(eps, mode, "mirror_R_remove")
    return report


def run_michelson_weak(t: float, n: int, mode: Coupling, sigma: float = 1.0,
                       delayed_choice: str = "keep_bs", rng=None, record: bool = True,
                       chunk: int = CHUNK) -> ScenarioReport:
    """Weak which-path measurement on N photons, one detector on mirror R.

    ``keep_bs`` recombines every photon at the splitter; ``remove_bs`` sends
    it to the strong which-path detectors. With ``record=False`` readings are
    aggregated on the fly and no ledger is kept (for very large N).
    """
    require(delayed_choice in DELAYED_CHOICES,
            f"delayed_choice must be one of {DELAYED_CHOICES}, got {delayed_choice!r}")
    keep_p = 1.0 if delayed_choice == "keep_bs" else 0.0
    rep = _simulate("run_michelson_weak", t, n, mode, sigma, keep_p, rng, record, chunk)
    rep.parameters["delayed_choice"] = delayed_choice
    del rep.parameters["keep_probability"]
    return rep


def run_transmission_delayed_choice(t: float, n: int, mode: Coupling, sigma: float = 1.0,
                                    rng=None, keep_probability: float = 0.5,
                                    record: bool = True, chunk: int = CHUNK) -> ScenarioReport:
    """Decide keep/remove for each photon only after its reading is recorded.

    The choice coin has its own random stream, so ``keep_probability=1``
    reproduces ``run_michelson_weak(..., "keep_bs")`` draw for draw.
    """
    require(0.0 <= keep_probability <= 1.0, "keep_probability must lie in [0, 1]")
    return _simulate("run_transmission_delayed_choice", t, n, mode, sigma,
                     keep_probability, rng, record, chunk)
