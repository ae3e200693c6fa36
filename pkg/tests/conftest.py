import pytest

from graphpot import generators as gen
from graphpot.graph import GraphFunction

ACCEPTANCE_LINES = pytest.StashKey[list]()


@pytest.fixture
def P3():
    return gen.path(3)


@pytest.fixture
def P4():
    return gen.path(4)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE_LINES, [])


def fn(values):
    """GraphFunction from a list indexed by vertex id."""
    return GraphFunction(dict(enumerate(values)))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
