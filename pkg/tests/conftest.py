import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# (criterion number, passed, detail) lines collected by test_acceptance
ACCEPTANCE: list[tuple[int, bool, str]] = []


@pytest.fixture
def report():
    def record(n: int, ok: bool, detail: str) -> None:
        ACCEPTANCE.append((n, ok, detail))
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
