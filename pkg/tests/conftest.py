from contextlib import contextmanager

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_configure(config):
    config.acceptance_results = []


@pytest.fixture
def criterion(request):
    """Context manager that records one acceptance line: pass or fail plus a detail."""

    @contextmanager
    def record(number: int, title: str):
        detail = {}
        try:
            yield detail
        except BaseException as exc:
            msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            request.config.acceptance_results.append((number, "FAIL", title, msg))
            raise
        else:
            request.config.acceptance_results.append((number, "PASS", title, detail.get("note", "")))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = sorted(config.acceptance_results)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, title, note in results:
        line = f"criterion {number:>2}: {status}  {title}"
        terminalreporter.write_line(line + (f"  ({note})" if note else ""))
