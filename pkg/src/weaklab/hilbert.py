"""Finite-dimensional state vectors, observables and passive optics.

Everything here is an immutable value over a small labeled basis: path labels
such as ``("R", "L")``, port indices, or spin labels ``("z+", "z-")``.
Units are chosen with hbar = 1.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-12

SPIN_LABELS = ("z+", "z-")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Complex amplitude vector over an ordered tuple of unique labels."""

    labels: tuple
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        amps = _frozen(self.amps)
        if amps.ndim != 1 or len(labels) != amps.shape[0]:
            raise ValueError("labels and amplitudes differ in length")
        if len(labels) < 2:
            raise ValueError("a state needs at least two basis labels")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate basis labels in {labels}")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, labels: Sequence, label) -> "PureState":
        labels = tuple(labels)
        amps = np.zeros(len(labels), dtype=complex)
        amps[_index(labels, label)] = 1.0
        return cls(labels, amps)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def probability(self, label) -> float:
        return float(abs(self.amps[_index(self.labels, label)]) ** 2)

    def with_amps(self, amps) -> "PureState":
        return PureState(self.labels, amps)

    def __repr__(self):
        body = ", ".join(f"{l}: {a:.6g}" for l, a in zip(self.labels, self.amps))
        return f"PureState({body})"


def _index(labels: tuple, label) -> int:
    try:
        return labels.index(label)
    except ValueError:
        raise KeyError(f"unknown basis label {label!r}; basis is {labels}") from None


def normalize(state: PureState) -> PureState:
    n = state.norm
    if not np.isfinite(n) or n <= 0.0:
        raise ValueError("degenerate state")
    return state.with_amps(state.amps / n)


def inner(a: PureState, b: PureState) -> complex:
    """Return <a|b>, conjugate-linear in ``a``."""
    if a.labels != b.labels:
        raise ValueError(f"basis mismatch: {a.labels} vs {b.labels}")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2 for normalized states."""
    return abs(inner(a, b)) ** 2


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("operator matrix must be square")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError("operator is not Hermitian")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def expectation(self, state: PureState) -> float:
        return float(np.real(np.vdot(state.amps, self.matrix @ state.amps)))

    def eigenspaces(self, tol: float = 1e-9) -> list[tuple[float, np.ndarray]]:
        """Group eigenvectors by eigenvalue; returns ``(value, projector)`` pairs
        in ascending eigenvalue order."""
        vals, vecs = np.linalg.eigh(self.matrix)
        groups: list[list[int]] = []
        for i, v in enumerate(vals):
            if groups and abs(v - vals[groups[-1][0]]) <= tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        out = []
        for idx in groups:
            v = vecs[:, idx]
            out.append((float(np.mean(vals[idx])), v @ v.conj().T))
        return out

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator(self.matrix + other.matrix)

    def __rmul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(float(scalar) * self.matrix)


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("unitary matrix must be square")
        err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if err > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max deviation {err:.3g})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, state: PureState) -> PureState:
        if state.dim != self.dim:
            raise ValueError("dimension mismatch between unitary and state")
        return state.with_amps(self.matrix @ state.amps)

    @property
    def T(self) -> "Unitary":
        """The same optic traversed in the reverse direction (reciprocity)."""
        return Unitary(self.matrix.T)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        return Unitary(self.matrix @ other.matrix)


def beam_splitter(transmission: float | None = None, ports: int = 2,
                  coefficients: Sequence[float] | None = None) -> Unitary:
    """Real beam-splitter unitary.

    Two ports: ``[[sqrt(T), sqrt(1-T)], [sqrt(1-T), -sqrt(T)]]``, which is its
    own inverse. With ``coefficients`` (nonnegative, summing to 1) the first
    column is ``sqrt(c)`` and the rest is completed by Gram-Schmidt over the
    standard basis, so the matrix is reproducible.
    """
    if coefficients is None:
        if ports != 2:
            raise ValueError("a multiport splitter needs explicit coefficients")
        if transmission is None or not 0.0 < transmission < 1.0:
            raise ValueError(f"transmission must lie in (0, 1), got {transmission}")
        t, r = np.sqrt(transmission), np.sqrt(1.0 - transmission)
        return Unitary(np.array([[t, r], [r, -t]]))

    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("need at least two splitting coefficients")
    if transmission is not None or (ports != 2 and ports != c.size):
        raise ValueError("give either a transmission or a coefficient vector")
    if np.any(c < 0):
        raise ValueError("splitting coefficients must be nonnegative")
    if abs(c.sum() - 1.0) > 1e-9:
        raise ValueError(f"splitting coefficients sum to {c.sum()}, not 1")
    n = c.size
    first = np.sqrt(c)
    cols = [first / np.linalg.norm(first)]
    for k in range(n):
        v = np.zeros(n)
        v[k] = 1.0
        for _ in range(2):  # second pass restores orthogonality lost to rounding
            for u in cols:
                v = v - (u @ v) * u
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            cols.append(v / nv)
        if len(cols) == n:
            break
    return Unitary(np.column_stack(cols))


def projector(label, labels: Sequence) -> HermitianOperator:
    labels = tuple(labels)
    m = np.zeros((len(labels), len(labels)))
    i = _index(labels, label)
    m[i, i] = 1.0
    return HermitianOperator(m)


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli(axis: Sequence[float]) -> HermitianOperator:
    """n . sigma for a unit 3-vector ``axis`` in the {z+, z-} basis."""
    n = np.asarray(axis, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise ValueError(f"axis must be a unit 3-vector, got {axis}")
    return HermitianOperator(sum(k * s for k, s in zip(n, _PAULI)))


def planar_axis(angle: float) -> np.ndarray:
    """Unit vector at ``angle`` from z inside the x-z plane."""
    return np.array([np.sin(angle), 0.0, np.cos(angle)])


def spin_state(axis: Sequence[float], sign: int = +1) -> PureState:
    """Eigenstate of n . sigma with eigenvalue ``sign``."""
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    vals, vecs = np.linalg.eigh(pauli(axis).matrix)
    v = vecs[:, 1 if sign > 0 else 0]
    # fix the global phase so the first nonzero amplitude is real positive
    k = int(np.argmax(np.abs(v) > 1e-12))
    v = v * np.exp(-1j * np.angle(v[k]))
    return PureState(SPIN_LABELS, v)


def identity(dim: int) -> Unitary:
    return Unitary(np.eye(dim))
