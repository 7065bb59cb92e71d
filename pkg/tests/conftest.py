from __future__ import annotations

import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from flagcert.graphs import ColoredGraph

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def colored_graphs(draw, min_n: int = 0, max_n: int = 8, colors=(0, 1, 2)):
    n = draw(st.integers(min_n, max_n))
    cols = draw(st.lists(st.sampled_from(colors), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    return ColoredGraph(n, cols)


def random_graph(rng: random.Random, n: int, weights=(1, 1, 1)) -> ColoredGraph:
    return ColoredGraph(n, rng.choices((0, 1, 2), weights=weights, k=n * (n - 1) // 2))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
