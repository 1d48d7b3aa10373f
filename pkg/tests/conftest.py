import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from genplanck.radiation import NATURAL, SI  # noqa: E402

# (criterion id, passed, detail) collected by test_acceptance.record
ACCEPTANCE_RESULTS = []


@pytest.fixture
def natural():
    return NATURAL


@pytest.fixture
def si():
    return SI


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, passed, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: r[0]):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {cid:>2}: {detail}")
