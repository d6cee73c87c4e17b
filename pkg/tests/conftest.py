import pytest


def pytest_configure(config):
    config._acceptance_lines = []


@pytest.fixture
def record(request):
    """Record one ``criterion N: PASS/FAIL`` line, printed now and in the summary."""

    def _record(number: int, passed: bool, detail: str = "") -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}" + (f" ({detail})" if detail else "")
        print(line)
        request.config._acceptance_lines.append(line)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
