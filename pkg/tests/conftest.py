import math

import numpy as np
import pytest
from hypothesis import strategies as st

from seqdiscrim.protocol import ProtocolParams


def random_params(rng: np.random.Generator) -> ProtocolParams:
    """A valid parameter set with both weight pairs generally unequal."""
    s = rng.uniform(0.0, 0.95)
    t = rng.uniform(s, 1.0)
    lo_b = (s / t) ** 2
    q1b = rng.uniform(lo_b, 1.0)
    q2b = lo_b / q1b if q1b > 0 else 0.0
    q1c = rng.uniform(t**2, 1.0)
    q2c = rng.uniform(t**2 / q1c, 1.0) if q1c > 0 else rng.uniform()
    return ProtocolParams(s=s, t=t, q1b=q1b, q2b=min(q2b, 1.0), q1c=q1c, q2c=min(q2c, 1.0))


@pytest.fixture
def param_sets():
    rng = np.random.default_rng(20131125)
    return [random_params(rng) for _ in range(20)]


@st.composite
def protocol_params(draw):
    s = draw(st.floats(0.0, 0.98))
    t = draw(st.floats(s, 1.0))
    if t == 0:
        t = s = 0.0
    lo_b = (s / t) ** 2 if t > 0 else 0.0
    q1b = draw(st.floats(lo_b, 1.0))
    q2b = min(lo_b / q1b, 1.0) if q1b > 0 else 0.0
    if q1b == 0 and s > 0:
        q1b, q2b = math.sqrt(lo_b), math.sqrt(lo_b)
    q1c = draw(st.floats(max(t**2, 1e-9), 1.0))
    q2c = draw(st.floats(min(t**2 / q1c, 1.0), 1.0))
    return ProtocolParams(s=s, t=t, q1b=q1b, q2b=q2b, q1c=q1c, q2c=q2c)


@st.composite
def overlaps(draw):
    return draw(st.floats(0.0, 1.0)), draw(st.floats(0.0, 1.0))


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    def record(number, title, ok, detail=""):
        status = "PASS" if ok else "FAIL"
        _ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
