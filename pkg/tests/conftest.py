import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from asymlab import PolyAsymNorm

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("repo")

ACCEPTANCE_LINES = []

coords = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@st.composite
def norms(draw, dims=(1, 2, 3)):
    """Full-rank polyhedral norms with small integer generators."""
    n = draw(st.sampled_from(dims))
    k = draw(st.integers(n, 2 * n + 2))
    G = draw(arrays(np.float64, (k, n), elements=st.integers(-3, 3).map(float)))
    if np.linalg.matrix_rank(G) < n:
        G = np.vstack([G, np.eye(n)])
    return PolyAsymNorm(G)


def vectors(n, count=None):
    shape = (n,) if count is None else (count, n)
    return arrays(np.float64, shape, elements=coords)


@pytest.fixture
def u():
    return PolyAsymNorm([[1.0]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
