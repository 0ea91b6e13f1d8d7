import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def record_criterion(request):
    """Record one acceptance line; printed again in the terminal summary."""
    def record(number, ok, title, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title}" + (
            f" ({detail})" if detail else "")
        request.config.stash[ACCEPTANCE].append((number, line))
        print(line)
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
