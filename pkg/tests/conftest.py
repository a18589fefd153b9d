import pytest

_LINES: list[str] = []


@pytest.fixture(scope="session")
def report():
    """Record one acceptance line; echoed again in the terminal summary."""

    def record(k: int, ok: bool, detail: str) -> None:
        line = f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} {detail}"
        print(line)
        _LINES.append((k, line))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
