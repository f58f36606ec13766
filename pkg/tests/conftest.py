import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, label = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key:>2}: {label}")
