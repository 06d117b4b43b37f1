import pytest

from epifuzz.fuzzy import default_rule_base

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def rule_base():
    return default_rule_base()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
