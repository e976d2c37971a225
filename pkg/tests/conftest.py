import numpy as np
import pytest
from hypothesis import strategies as st

from ptlaser import TransferMatrix

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
matrices = st.builds(TransferMatrix, complexes, complexes, complexes, complexes)


def unimodular(m11, m12, m21):
    """Complete three entries to a det-1 matrix."""
    return TransferMatrix(m11, m12, m21, (1 + m12 * m21) / m11)


def entries(m):
    return np.array([m.m11, m.m12, m.m21, m.m22], dtype=complex)


def rel_dev(a, b):
    a, b = entries(a), entries(b)
    return np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(20101)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
