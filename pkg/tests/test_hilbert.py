import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hermitians, states
from weaklab.hilbert import (HermitianOperator, PureState, Unitary, beam_splitter, fidelity,
                             inner, normalize, pauli, planar_axis, projector, spin_state)

T5 = 0.556789
PATH = ("R", "L")


def test_normalize_examples():
    s = normalize(PureState((0, 1), [1, 1]))
    assert np.allclose(s.amps, [1 / math.sqrt(2)] * 2, atol=1e-15)
    s = normalize(PureState((0, 1), [1, 0]))
    assert np.array_equal(s.amps, [1, 0])
    amps = [math.sqrt(T5), math.sqrt(1 - T5)]
    assert np.allclose(normalize(PureState(PATH, amps)).amps, amps, atol=1e-15)


def test_normalize_keeps_relative_phase():
    s = normalize(PureState((0, 1), [2, 2j]))
    assert np.angle(s.amps[1] / s.amps[0]) == pytest.approx(math.pi / 2)


def test_degenerate_state():
    with pytest.raises(ValueError, match="degenerate state"):
        normalize(PureState((0, 1), [0, 0]))


def test_state_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        PureState((0, 0), [1, 0])


def test_inner_examples():
    psi = spin_state((1, 0, 0), +1)
    assert inner(psi, psi) == pytest.approx(1)
    assert inner(spin_state((0, 0, 1), +1), psi) == pytest.approx(1 / math.sqrt(2))
    assert inner(PureState.basis(PATH, "L"), PureState.basis(PATH, "R")) == 0


def test_inner_basis_mismatch():
    with pytest.raises(ValueError):
        inner(PureState.basis(PATH, "L"), PureState.basis(("a", "b"), "a"))


def test_beam_splitter_two_port():
    for t in (0.1, 0.5, T5):
        u = beam_splitter(t).matrix
        expect = [[math.sqrt(t), math.sqrt(1 - t)], [math.sqrt(1 - t), -math.sqrt(t)]]
        assert np.allclose(u, expect, atol=1e-15)
    twice = beam_splitter(0.5).matrix @ beam_splitter(0.5).matrix @ [1, 0]
    assert np.allclose(np.abs(twice), [1, 0], atol=1e-15)
    out = beam_splitter(T5).matrix @ [1, 0]
    assert np.allclose(out, [math.sqrt(T5), math.sqrt(1 - T5)], atol=1e-15)


def test_beam_splitter_multiport():
    c = (0.5, 0.3, 0.2)
    u = beam_splitter(ports=3, coefficients=c).matrix
    assert np.allclose(np.abs(u[:, 0]) ** 2, c, atol=1e-14)
    # unitarity by explicit multiplication
    assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-12
    assert np.array_equal(u, beam_splitter(ports=3, coefficients=c).matrix)


@pytest.mark.parametrize("kwargs", [
    {"transmission": 0.0}, {"transmission": 1.0}, {"transmission": 1.5},
    {"ports": 3, "coefficients": (0.5, 0.3, 0.1)},
    {"ports": 3, "coefficients": (1.2, -0.3, 0.1)},
])
def test_beam_splitter_errors(kwargs):
    with pytest.raises(ValueError):
        beam_splitter(**kwargs)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-6, 1 - 1e-6))
def test_beam_splitter_round_trip(t):
    u = beam_splitter(t).matrix
    assert np.max(np.abs(u.conj().T @ u - np.eye(2))) < 1e-10
    uu = u @ u
    phase = uu[0, 0]
    assert abs(abs(phase) - 1) < 1e-12
    assert np.max(np.abs(uu - phase * np.eye(2))) < 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=6).filter(lambda v: sum(v) > 1e-3))
def test_multiport_unitarity(v):
    c = np.array(v) / sum(v)
    u = beam_splitter(ports=len(c), coefficients=c).matrix
    assert np.max(np.abs(u.conj().T @ u - np.eye(len(c)))) < 1e-10
    assert np.allclose(np.abs(u[:, 0]) ** 2, c, atol=1e-12)


def test_projector_examples():
    p = projector("R", ("L", "R")).matrix
    assert np.array_equal(p, np.diag([0, 1]))
    assert np.array_equal(p @ p, p)
    psi = PureState(PATH, [math.sqrt(T5), math.sqrt(1 - T5)])
    assert projector("R", PATH).expectation(psi) == pytest.approx(T5, abs=1e-15)
    with pytest.raises(KeyError):
        projector("X", PATH)


def test_projectors_resolve_identity():
    labels = ("a", "b", "c", "d")
    total = sum(projector(l, labels).matrix for l in labels)
    assert np.array_equal(total, np.eye(4))


def test_pauli_examples():
    assert np.array_equal(pauli((0, 0, 1)).matrix, np.diag([1, -1]))
    assert np.array_equal(pauli((1, 0, 0)).matrix, [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        pauli((1, 1, 0))


@settings(max_examples=60, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_pauli_eigenvalues(theta, phi):
    axis = (math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta))
    vals = np.linalg.eigvalsh(pauli(axis).matrix)
    assert np.allclose(vals, [-1, 1], atol=1e-12)
    for sign in (1, -1):
        s = spin_state(axis, sign)
        assert np.allclose(pauli(axis).matrix @ s.amps, sign * s.amps, atol=1e-12)


def test_planar_axis():
    assert np.allclose(planar_axis(0), (0, 0, 1))
    assert np.allclose(planar_axis(math.pi / 2), (1, 0, 0))


def test_hermitian_rejects_non_hermitian():
    with pytest.raises(ValueError):
        HermitianOperator([[0, 1], [0, 0]])


def test_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        Unitary([[1, 1], [0, 1]])


def test_eigenspaces_keep_degeneracy():
    a = HermitianOperator(np.diag([1.0, 1.0, -2.0]))
    spaces = a.eigenspaces()
    assert [v for v, _ in spaces] == pytest.approx([-2.0, 1.0])
    assert np.allclose(spaces[1][1], np.diag([1, 1, 0]))


@settings(max_examples=80, deadline=None)
@given(states(3), states(3))
def test_inner_conjugate_symmetry(a, b):
    assert inner(a, b) == pytest.approx(np.conj(inner(b, a)), abs=1e-14)
    assert 0 <= fidelity(a, b) <= 1 + 1e-12


@settings(max_examples=80, deadline=None)
@given(hermitians(3), states(3))
def test_expectation_is_real_and_bounded(a, psi):
    vals = np.linalg.eigvalsh(a.matrix)
    e = a.expectation(psi)
    assert vals[0] - 1e-12 <= e <= vals[-1] + 1e-12
