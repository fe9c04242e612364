import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

# Filled by the acceptance module: one "PASS/FAIL criterion N: ..." line each.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
