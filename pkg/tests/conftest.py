import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

SQ5 = math.sqrt(5.0)


@pytest.fixture(scope="session")
def sasaki_points():
    return [(1.0, (1 - SQ5) / 4, 1.0), (1.0, (1 + SQ5) / 4, 1.0)]


@pytest.fixture(scope="session")
def trace512():
    from wkspin.moduli import trace

    return trace(512)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
