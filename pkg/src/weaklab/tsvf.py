"""Pre- and post-selected quantities: weak values, projective measurement and
post-selection."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import HermitianOperator, PureState, inner, normalize
from .pointer import COLLAPSE_FIDELITY, couple, sample_readouts
from .statkit import OutcomeLedger

ORTHOGONAL_TOL = 1e-12
EIGEN_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class TwoStateVector:
    pre: PureState
    post: PureState


def weak_value(A: HermitianOperator, tsv: TwoStateVector) -> complex:
    """<post|A|pre> / <post|pre>, with both states normalized first."""
    pre, post = normalize(tsv.pre), normalize(tsv.post)
    if pre.labels != post.labels:
        raise ValueError("pre- and post-selected states live in different bases")
    den = inner(post, pre)
    if abs(den) <= ORTHOGONAL_TOL:
        raise ValueError("undefined weak value: pre- and post-selection are orthogonal")
    return complex(np.vdot(post.amps, A.matrix @ pre.amps) / den)


def _checked_eigenspaces(A: HermitianOperator):
    spaces = A.eigenspaces()
    for value, proj in spaces:
        residual = np.max(np.abs(A.matrix @ proj - value * proj))
        if residual > EIGEN_RESIDUAL_TOL:
            raise ValueError(f"eigendecomposition residual {residual:.2e} exceeds tolerance")
    return spaces


def strong_measure_batch(states: np.ndarray, A: HermitianOperator, rng: np.random.Generator):
    """Projective measurement of every row of ``states``.

    Returns ``(eigenvalues, post_states)``; degenerate eigenspaces are kept
    whole (Lueders rule).
    """
    spaces = _checked_eigenspaces(A)
    values = np.array([v for v, _ in spaces])
    comps = np.stack([states @ p.T for _, p in spaces], axis=1)
    probs = np.sum(np.abs(comps) ** 2, axis=-1)
    cum = np.cumsum(probs / probs.sum(axis=1, keepdims=True), axis=1)
    u = rng.random(states.shape[0])
    k = np.minimum((u[:, None] > cum).sum(axis=1), len(spaces) - 1)
    out = comps[np.arange(states.shape[0]), k]
    out /= np.linalg.norm(out, axis=1, keepdims=True)
    return values[k], out


def strong_measure(state: PureState, A: HermitianOperator,
                   rng: np.random.Generator) -> tuple[float, PureState]:
    vals, out = strong_measure_batch(normalize(state).amps[None, :], A, rng)
    return float(vals[0]), PureState(state.labels, out[0])


def postselect(state: PureState, target: PureState, rng: np.random.Generator) -> bool:
    """Succeeds with probability |<target|state>|^2."""
    p = abs(inner(normalize(target), normalize(state))) ** 2
    return bool(rng.random() < p)


def postselected_readouts(A: HermitianOperator, tsv: TwoStateVector, epsilon: float,
                          sigma: float, n_accept: int, rng: np.random.Generator,
                          chunk: int = 1_000_000) -> tuple[OutcomeLedger, int]:
    """Weakly measure ``A`` on copies of ``tsv.pre``, read each pointer out,
    then post-select on ``tsv.post``; repeat until ``n_accept`` survivors.

    Returns the survivors' ledger (trial ids are attempt indices) and the
    number of attempts.
    """
    if n_accept < 2:
        raise ValueError("need at least two post-selected trials")
    joint = couple(tsv.pre, A, epsilon, sigma)
    target = normalize(tsv.post).amps
    readout_rng, select_rng = rng.spawn(2)
    vals, ids, flags = [], [], []
    attempts = accepted = 0
    while accepted < n_accept:
        x, after, fid = sample_readouts(joint, readout_rng, chunk)
        p = np.abs(after @ target.conj()) ** 2
        ok = select_rng.random(chunk) < p
        idx = np.flatnonzero(ok)[: n_accept - accepted]
        vals.append(x[idx])
        flags.append(fid[idx] < COLLAPSE_FIDELITY)
        ids.append(attempts + idx)
        accepted += idx.size
        attempts += chunk if accepted < n_accept else int(idx[-1]) + 1
    v = np.concatenate(vals)
    ledger = OutcomeLedger(np.concatenate(ids), np.zeros(v.size, dtype=int), v,
                           np.full(v.size, float(epsilon)), np.concatenate(flags),
                           "fixed", float(epsilon), "postselected")
    return ledger, attempts
