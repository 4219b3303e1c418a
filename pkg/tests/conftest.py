import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def acceptance(request):
    """Call ``acceptance(n, ok, text)`` to log a criterion; the line is printed and repeated in the summary."""
    lines = request.config.stash[_LINES]

    def record(n, ok, text):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {text}"
        print(line)
        lines.append((n, line))
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
