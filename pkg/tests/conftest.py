import pytest

_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    """Print a criterion verdict line straight to the terminal and keep it for the summary."""

    def emit(number, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _LINES.append(line)
        with capsys.disabled():
            print("\n" + line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
