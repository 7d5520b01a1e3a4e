"""Shared fixtures: the two full certification runs are expensive, so each
runs once per session and is shared by the module and acceptance suites."""

from __future__ import annotations

import time

import pytest

from hopfstokes.oracle import oracle_delta
from hopfstokes.pipeline import certify
from hopfstokes.problems import example1, example2
from hopfstokes.shooting import ShootingConfig

_CACHE: dict = {}


def _timed(key, fn):
    if key not in _CACHE:
        t0 = time.perf_counter()
        value = fn()
        _CACHE[key] = (value, time.perf_counter() - t0)
    return _CACHE[key]


@pytest.fixture(scope="session")
def ex1_run():
    """(certificate, seconds) for Example 1 in refine mode, default configuration."""
    return _timed("ex1", lambda: certify(example1(), ShootingConfig(), refine=True, workers=1))


@pytest.fixture(scope="session")
def ex2_run():
    """(certificate, seconds) for Example 2 in verify mode, default configuration."""
    return _timed("ex2", lambda: certify(example2(), ShootingConfig(), refine=False, workers=1))


@pytest.fixture(scope="session")
def ex1_oracle():
    return _timed("ex1_oracle", lambda: oracle_delta(example1(), ShootingConfig()))[0]


@pytest.fixture(scope="session")
def ex2_oracle():
    return _timed("ex2_oracle", lambda: oracle_delta(example2(), ShootingConfig()))[0]


# -- acceptance summary ------------------------------------------------------------

ACCEPTANCE: dict = {}


def record(number: int, ok: bool, detail: str) -> None:
    """Store and print one acceptance line; the summary repeats them at the end."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
