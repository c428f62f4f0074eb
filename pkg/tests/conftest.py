import time

import pytest

SESSION_START = time.perf_counter()
CRITERIA = {}


def record_criterion(number, passed, detail):
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    CRITERIA[number] = line
    print(line)
    return passed


def pytest_collection_modifyitems(config, items):
    # acceptance criteria run last so the runtime criterion sees the whole suite
    items.sort(key=lambda it: it.nodeid.startswith("tests/test_acceptance.py")
               or "test_acceptance.py" in it.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[n])


@pytest.fixture(scope="session")
def session_start():
    return SESSION_START
