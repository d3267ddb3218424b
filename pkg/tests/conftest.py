"""Test-wide configuration: acceptance-line reporting.

Acceptance tests record one PASS/FAIL/WARN line per criterion through
``record_criterion``; the lines are echoed immediately and repeated in
the terminal summary so the verdicts are visible in one block at the end
of any run.
"""

import sys

_LINES = []


def record_criterion(name: str, ok: bool, detail: str = "",
                     soft: bool = False) -> bool:
    status = "PASS" if ok else ("WARN" if soft else "FAIL")
    line = f"{status} {name}" + (f": {detail}" if detail else "")
    _LINES.append(line)
    print(line, file=sys.stderr)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for line in _LINES:
        terminalreporter.write_line("  " + line)
