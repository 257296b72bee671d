import sys
from importlib.resources import files

import pytest

DATA = files("matslocc") / "data"


@pytest.fixture
def space_path():
    return lambda name: str(DATA / "spaces" / f"{name}.json")


@pytest.fixture
def state_path():
    return lambda name: str(DATA / "states" / f"{name}.json")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
