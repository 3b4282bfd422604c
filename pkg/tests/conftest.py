import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hedgepop import ChoiceProblem, Lottery

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for an acceptance criterion."""

    def record(key: str, ok: bool, detail: str = "") -> None:
        prev = _CRITERIA.get(key)
        if prev is not None:
            ok = ok and prev[0]
            detail = "; ".join(d for d in (prev[1], detail) if d)
        _CRITERIA[key] = (ok, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: (int(k.split()[0]), k)):
        ok, detail = _CRITERIA[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")


# A nondegenerate lottery with 2..5 positive outcomes.
@st.composite
def lotteries(draw, min_size=2, max_size=5, lo=1e-3, hi=1e3):
    n = draw(st.integers(min_size, max_size))
    logs = draw(st.lists(st.floats(math.log(lo), math.log(hi)), min_size=n, max_size=n, unique=True))
    values = []
    # keep outcomes resolvably apart; strict inequalities need the spread to
    # exceed rounding error
    for v in sorted(math.exp(t) for t in logs):
        if not values or v > values[-1] * (1 + 1e-3):
            values.append(round(v, 9))
    if len(values) < 2:
        values = [values[0], values[0] * 2]
    weights = draw(st.lists(st.floats(0.05, 1.0), min_size=len(values), max_size=len(values)))
    total = sum(weights)
    return Lottery([(v, w / total) for v, w in zip(values, weights)])


@st.composite
def problems(draw):
    y = draw(lotteries())
    mu = draw(st.floats(0.01, 100.0))
    return ChoiceProblem(y, mu)


def random_lotteries(rng: np.random.Generator, n: int, binary: bool = False):
    out = []
    for _ in range(n):
        k = 2 if binary else int(rng.integers(2, 6))
        values = np.exp(rng.uniform(-4, 4, size=k))
        probs = rng.dirichlet(np.ones(k))
        out.append(Lottery(list(zip(values, probs))))
    return out
