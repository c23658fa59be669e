import numpy as np
import pytest
from hypothesis import strategies as st

from weaklab.hilbert import HermitianOperator, PureState, normalize


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


finite = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


@st.composite
def states(draw, dim=2, labels=None):
    re = draw(st.lists(finite, min_size=dim, max_size=dim))
    im = draw(st.lists(finite, min_size=dim, max_size=dim))
    amps = np.array(re) + 1j * np.array(im)
    if np.linalg.norm(amps) < 1e-3:
        amps[0] += 1.0
    return normalize(PureState(labels or tuple(range(dim)), amps))


@st.composite
def hermitians(draw, dim=2):
    re = np.array(draw(st.lists(finite, min_size=dim * dim, max_size=dim * dim))).reshape(dim, dim)
    im = np.array(draw(st.lists(finite, min_size=dim * dim, max_size=dim * dim))).reshape(dim, dim)
    m = re + 1j * im
    return HermitianOperator((m + m.conj().T) / 2)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
