"""Shared pytest hooks.

Collects the one-line acceptance results so they show up in the terminal
summary even when output capture is on.
"""

ACCEPTANCE_LINES: "list[str]" = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance report")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
