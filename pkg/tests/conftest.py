import pytest
from hypothesis import settings

from pfaffseries.system import PfaffianSystem

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# filled in by test_acceptance.py, printed after the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def sys_of(p, f):
    return PfaffianSystem.from_strings(p, f)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
