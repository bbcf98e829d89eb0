import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sksiks.specfile import load  # noqa: E402


@pytest.fixture
def greek():
    return load("greek-virus.json")


@pytest.fixture
def sentences():
    return load("sentences.json")


@pytest.fixture
def demo_seq(greek):
    return greek.build_sequence()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
