"""Gaussian pointer, von Neumann coupling and partial-collapse readout.

The pointer amplitude is ``exp(-(x - c)**2 / (2 sigma**2))`` (normalized), so
its position density is a normal law with standard deviation ``sigma/sqrt(2)``
and two pointers displaced by ``d`` overlap by ``exp(-d**2 / (4 sigma**2))``.

Coupling ``epsilon * g(t) * A * P`` with unit-integral ``g`` leaves each
eigenbranch of ``A`` (eigenvalue ``a``) entangled with a pointer centred at
``epsilon * a``. Reading the pointer out reweights the branches by the pointer
amplitude at the sampled position (Lueders/Bayes update).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .hilbert import HermitianOperator, PureState, inner, normalize

COLLAPSE_FIDELITY = 0.5


def amplitude(x, center=0.0, sigma=1.0):
    return (np.pi * sigma**2) ** -0.25 * np.exp(-((x - center) ** 2) / (2 * sigma**2))


def density(x, center=0.0, sigma=1.0):
    return amplitude(x, center, sigma) ** 2


def overlap(shift, sigma=1.0):
    """<pointer(c) | pointer(c + shift)> for two equal-width pointers."""
    return np.exp(-np.square(shift) / (4.0 * sigma**2))


def readout_std(sigma: float) -> float:
    """Standard deviation of a single pointer reading about its centre."""
    return sigma / np.sqrt(2.0)


@dataclass(frozen=True)
class GaussianPointer:
    center: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"pointer width must be positive, got {self.sigma}")

    def amplitude(self, x):
        return amplitude(x, self.center, self.sigma)

    def density(self, x):
        return density(x, self.center, self.sigma)

    def shifted(self, d: float) -> "GaussianPointer":
        return GaussianPointer(self.center + d, self.sigma)

    def _quad(self, f):
        half = 40.0 * self.sigma
        val, _ = integrate.quad(f, self.center - half, self.center + half,
                                points=[self.center], epsabs=1e-14, epsrel=1e-13,
                                limit=200)
        return val

    def position_spread(self) -> float:
        norm = self._quad(self.density)
        mean = self._quad(lambda x: x * self.density(x)) / norm
        var = self._quad(lambda x: (x - mean) ** 2 * self.density(x)) / norm
        return float(np.sqrt(var))

    def momentum_spread(self) -> float:
        # real amplitude => <p> = 0 and <p^2> = int |psi'|^2
        def dpsi(x):
            return -(x - self.center) / self.sigma**2 * self.amplitude(x)

        norm = self._quad(self.density)
        return float(np.sqrt(self._quad(lambda x: dpsi(x) ** 2) / norm))

    def uncertainty_product(self) -> float:
        return self.position_spread() * self.momentum_spread()


@dataclass(frozen=True)
class ReadoutRecord:
    """One individually recorded pointer reading."""

    value: float
    epsilon: float
    collapsed_flag: bool = False
    trial_id: int = 0
    cycle_id: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("readout records need a positive coupling strength")


@dataclass(frozen=True, eq=False)
class JointState:
    """System eigenbranches of the coupled observable, each carrying a
    displaced pointer.

    ``vectors[b]`` is the normalized projection of the system onto the b-th
    eigenspace (in the original labeled basis) and ``amplitudes[b]`` its weight,
    so ``sum_b amplitudes[b] * vectors[b]`` is the pre-coupling system state.
    """

    labels: tuple
    eigenvalues: np.ndarray
    amplitudes: np.ndarray
    vectors: np.ndarray
    epsilon: float
    sigma: float

    def __post_init__(self):
        for name in ("eigenvalues", "amplitudes", "vectors"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        total = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"branch weights sum to {total}, not 1")

    @property
    def centers(self) -> np.ndarray:
        return self.epsilon * self.eigenvalues

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def system(self) -> PureState:
        return PureState(self.labels, self.amplitudes @ self.vectors)

    @property
    def components(self) -> np.ndarray:
        """Unnormalized branch states, shape ``(branches, dim)``."""
        return self.amplitudes[:, None] * self.vectors

    def branches(self) -> list[tuple[float, complex, float]]:
        return [(float(a), complex(c), float(m))
                for a, c, m in zip(self.eigenvalues, self.amplitudes, self.centers)]

    def marginal_density(self, x):
        x = np.asarray(x, dtype=float)
        return sum(p * density(x, m, self.sigma)
                   for p, m in zip(self.probabilities, self.centers))


def _check_coupling(epsilon: float, sigma: float):
    if not epsilon > 0:
        raise ValueError(f"coupling strength must be positive, got {epsilon}")
    if not sigma > 0:
        raise ValueError(f"pointer width must be positive, got {sigma}")


def couple(system: PureState, A: HermitianOperator, epsilon: float,
           sigma: float = 1.0) -> JointState:
    """Entangle ``system`` with a fresh pointer through observable ``A``."""
    _check_coupling(epsilon, sigma)
    if not isinstance(A, HermitianOperator):
        A = HermitianOperator(A)
    if A.dim != system.dim:
        raise ValueError("observable and state dimensions differ")
    psi = normalize(system).amps
    vals, amps, vecs = [], [], []
    for value, proj in A.eigenspaces():
        comp = proj @ psi
        w = np.linalg.norm(comp)
        if w > 1e-15:
            vals.append(value)
            amps.append(w)
            vecs.append(comp / w)
    amps = np.array(amps, dtype=complex)
    amps /= np.linalg.norm(amps)
    return JointState(system.labels, np.array(vals), amps, np.array(vecs),
                      float(epsilon), float(sigma))


def _draw(probs: np.ndarray, centers: np.ndarray, sigma: float,
          rng: np.random.Generator, size: int) -> np.ndarray:
    """Sample pointer positions from a branch mixture.

    ``probs`` is ``(k,)`` or ``(size, k)``. One uniform (branch choice) and one
    normal (pointer noise) are drawn per reading, in that order.
    """
    cum = np.atleast_2d(np.cumsum(probs / probs.sum(axis=-1, keepdims=True), axis=-1))
    u = rng.random(size)
    branch = np.minimum((u[:, None] > cum).sum(axis=-1), centers.size - 1)
    return centers[branch] + readout_std(sigma) * rng.standard_normal(size)


def _branch_weights(x: np.ndarray, centers: np.ndarray, sigma: float) -> np.ndarray:
    # amplitude ratios relative to the best-matching branch keep exp() finite
    expo = -((x[:, None] - centers[None, :]) ** 2) / (2 * sigma**2)
    expo -= expo.max(axis=1, keepdims=True)
    return np.exp(expo)


def _unit_rows(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def sample_readouts(joint: JointState, rng: np.random.Generator, size: int):
    """Vectorized ``readout`` of ``size`` independent copies of ``joint``.

    Returns ``(values, post_amps, fidelities)``; ``post_amps`` has one
    normalized post-readout system state per row.
    """
    x = _draw(joint.probabilities, joint.centers, joint.sigma, rng, size)
    after = posterior_amps(joint, x)
    fid = np.abs(after @ joint.system.amps.conj()) ** 2
    return x, after, fid


def posterior_amps(joint: JointState, x) -> np.ndarray:
    """Normalized system state(s) after reading the pointer at ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _unit_rows(_branch_weights(x, joint.centers, joint.sigma) @ joint.components)


def readout(joint: JointState, rng: np.random.Generator, trial_id: int = 0,
            cycle_id: int = 0) -> tuple[ReadoutRecord, PureState]:
    """Strongly read the pointer; the system is only partially collapsed."""
    x, after, fid = sample_readouts(joint, rng, 1)
    rec = ReadoutRecord(float(x[0]), joint.epsilon,
                        bool(fid[0] < COLLAPSE_FIDELITY), trial_id, cycle_id)
    return rec, PureState(joint.labels, after[0])


def weak_readout_batch(states: np.ndarray, A: HermitianOperator, epsilon: float,
                       sigma: float, rng: np.random.Generator):
    """Couple each row of ``states`` to its own fresh pointer and read it out.

    Returns ``(values, post_states, fidelities)``.
    """
    _check_coupling(epsilon, sigma)
    spaces = A.eigenspaces()
    centers = epsilon * np.array([v for v, _ in spaces])
    comps = np.stack([states @ p.T for _, p in spaces], axis=1)
    probs = np.sum(np.abs(comps) ** 2, axis=-1)
    x = _draw(probs, centers, sigma, rng, states.shape[0])
    after = _unit_rows(np.einsum("mk,mkn->mn", _branch_weights(x, centers, sigma), comps))
    fid = np.abs(np.sum(_unit_rows(states).conj() * after, axis=1)) ** 2
    return x, after, fid


def mean_shift(joint: JointState, post: PureState | None = None) -> float:
    """Expected pointer position, optionally conditioned on post-selection.

    Without ``post`` this is ``epsilon * <A>``. With ``post`` it is the exact
    mean of the conditioned pointer density, which tends to
    ``epsilon * Re(A_w)`` as ``epsilon / sigma -> 0``.
    """
    mu = joint.centers
    if post is None:
        return float(joint.probabilities @ mu)
    if post.labels != joint.labels:
        raise ValueError("post-selection basis differs from the system basis")
    w = joint.components @ normalize(post).amps.conj()
    if abs(w.sum()) <= 1e-12:
        raise ValueError("post-selection annihilates state")
    O = overlap(mu[:, None] - mu[None, :], joint.sigma)
    gram = np.conj(w)[:, None] * w[None, :] * O
    z = np.real(gram.sum())
    num = np.real(np.sum(gram * (mu[:, None] + mu[None, :]) / 2))
    return float(num / z)


def wrong_port_probability(epsilon: float, sigma: float, T: float) -> float:
    """Probability that a photon leaves a Michelson interferometer through the
    dark port when one arm mirror is coupled to a pointer with strength
    ``epsilon``.

    The returning arms carry pointers displaced by ``epsilon`` relative to each
    other; the dark-port amplitude is ``sqrt(T(1-T)) (g(x-eps) - g(x))``, giving
    ``2 T (1-T) (1 - exp(-eps^2 / (4 sigma^2)))``.
    """
    if epsilon < 0:
        raise ValueError("coupling strength must be nonnegative")
    if not sigma > 0:
        raise ValueError("pointer width must be positive")
    if not 0.0 < T < 1.0:
        raise ValueError("transmission must lie in (0, 1)")
    return float(2.0 * T * (1.0 - T) * -np.expm1(-(epsilon**2) / (4.0 * sigma**2)))


def readout_fidelity(before: PureState, after: PureState) -> float:
    return abs(inner(before, after)) ** 2
