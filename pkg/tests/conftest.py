from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from skppr import Graph, generate_power_law

import helpers


@pytest.fixture(scope="session")
def two_cycle() -> Graph:
    return Graph.from_arcs(2, [(0, 1), (1, 0)], is_undirected=True)


@pytest.fixture(scope="session")
def self_loop() -> Graph:
    # Node 1 feeds node 0; node 0 loops on itself.
    return Graph.from_arcs(2, [(0, 0), (1, 0)], is_undirected=False)


@pytest.fixture(scope="session")
def small_directed() -> Graph:
    return helpers.random_graph(20, np.random.default_rng(7), directed=True)


@pytest.fixture(scope="session")
def small_undirected() -> Graph:
    return helpers.random_graph(20, np.random.default_rng(8), directed=False)


@pytest.fixture(scope="session")
def powerlaw_100() -> Graph:
    return generate_power_law(100, attach=3, seed=1)


# ---------------------------------------------------------------------------
# Acceptance reporting: test_acceptance.py records one line per criterion and
# the summary hook prints them all, pass or fail, at the end of the run.

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    def record(criterion: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        line = f"[acceptance] {status} {criterion}"
        if detail:
            line += f" — {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
