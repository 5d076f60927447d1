"""Collects acceptance verdict lines and echoes them after the test summary,
so the per-criterion PASS/FAIL lines always reach the terminal regardless of
output capture."""

_acceptance_lines = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
