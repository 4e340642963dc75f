"""Shared fixtures plus one-line-per-criterion acceptance reporting."""

from __future__ import annotations

import random

import pytest

from mdltab.data import Dataset

# ---------------------------------------------------------------------------
# acceptance reporting: tests marked @pytest.mark.acceptance(n, "description")
# print one PASS/FAIL/SKIP line per criterion at the end of the run.

_results: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(num, description): acceptance criterion test"
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    num, desc = marker.args
    status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(
        report.outcome, report.outcome.upper()
    )
    prev = _results.get(num)
    if prev is None or (prev[0] == "PASS" and status != "PASS"):
        _results[num] = (status, desc)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        status, desc = _results[num]
        terminalreporter.write_line(f"criterion {num}: {status} - {desc}")


# ---------------------------------------------------------------------------
# worked-example datasets (items densified to 0-based ids)


@pytest.fixture
def worked_example() -> Dataset:
    """Ten transactions over items 1..5, stored 0-based (paper labels - 1)."""
    rows = [
        (1, 2, 3, 4),
        (1, 2, 3, 4),
        (1, 2, 4),
        (2, 3, 4, 5),
        (3, 4, 5),
        (4, 5),
        (2,),
        (3,),
        (4,),
        (5,),
    ]
    return Dataset([tuple(i - 1 for i in t) for t in rows], 5, [str(i) for i in range(1, 6)])


@pytest.fixture
def cluster_example_1() -> Dataset:
    rows = [
        (1, 2, 3, 4),
        (1, 2, 3, 4),
        (2, 3, 4, 5),
        (2, 3, 4, 5),
        (3, 4, 5),
        (3, 4, 5),
        (4, 5),
    ]
    return Dataset([tuple(i - 1 for i in t) for t in rows], 5, [str(i) for i in range(1, 6)])


@pytest.fixture
def cluster_example_2() -> Dataset:
    rows = [
        (7, 8, 9),
        (4, 5, 6, 7, 8, 9),
        (1, 2, 3, 4, 5, 6),
        (1, 2, 3),
    ]
    return Dataset([tuple(i - 1 for i in t) for t in rows], 9, [str(i) for i in range(1, 10)])


def ids(*labels: int) -> tuple[int, ...]:
    """Paper item labels (1-based) to internal ids (0-based)."""
    return tuple(x - 1 for x in labels)


def random_dataset(rng: random.Random, max_m: int = 12, max_n: int = 30) -> Dataset:
    """Small random dataset for property tests; may contain duplicates and
    empty transactions."""
    m = rng.randint(2, max_m)
    n = rng.randint(1, max_n)
    txs = []
    for _ in range(n):
        density = rng.uniform(0.1, 0.7)
        txs.append(tuple(i for i in range(m) if rng.random() < density))
    return Dataset(txs, m)
