import time

import numpy as np
import pytest

from darbouxheat import DressingChain

ACCEPTANCE_LINES = pytest.StashKey[list]()
SESSION_START = pytest.StashKey[float]()
SUITE_BUDGET = 300.0


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []
    config.stash[SESSION_START] = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash[ACCEPTANCE_LINES]
    elapsed = time.perf_counter() - config.stash[SESSION_START]
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
    status = "PASS" if elapsed < SUITE_BUDGET else "FAIL"
    terminalreporter.write_line(f"{status}  [9] full suite wall time {elapsed:.1f}s (< {SUITE_BUDGET:.0f}s)")


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config.stash[SESSION_START]
    if elapsed > SUITE_BUDGET and exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


@pytest.fixture
def accept(request):
    """Record one PASS/FAIL line; the summary prints them in order."""

    def record(criterion, ok, detail, seconds):
        line = f"{'PASS' if ok else 'FAIL'}  [{criterion}] {detail} ({seconds:.2f}s)"
        request.config.stash[ACCEPTANCE_LINES].append(line)
        print(line)
        return ok

    return record


@pytest.fixture
def kink_chain():
    return DressingChain.kink(1.0)


@pytest.fixture
def two_seed_chain():
    return DressingChain.parse("cosh:1,sinh:2")


@pytest.fixture
def rng():
    return np.random.default_rng(7)
