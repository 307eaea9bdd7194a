import pytest

from glauberkit import graph as gr


@pytest.fixture
def k2():
    return gr.path(2)


@pytest.fixture
def c6():
    return gr.cycle(6)


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """``acceptance(number, ok, detail)`` prints one PASS/FAIL line, keeps it
    for the terminal summary, and asserts ``ok``."""

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"acceptance {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config._acceptance_lines.append(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
