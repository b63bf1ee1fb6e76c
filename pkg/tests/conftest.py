import numpy as np
import pytest
from hypothesis import strategies as st

from minimax_detect.core import Channel

# acceptance criteria append (criterion, passed, detail) here
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_LINES):
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number}. {title}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_channel(rng, k):
    return Channel.from_scores(rng.uniform(size=k))


probability = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
interior = st.floats(min_value=1e-6, max_value=1 - 1e-6, allow_nan=False)


@st.composite
def channels(draw, min_k=1, max_k=6, elements=probability):
    k = draw(st.integers(min_k, max_k))
    scores = draw(st.lists(elements, min_size=k, max_size=k))
    return Channel.from_scores(scores)


@st.composite
def simplex(draw, k):
    raw = draw(st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=k, max_size=k))
    w = np.asarray(raw)
    return w / w.sum()
