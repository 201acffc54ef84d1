import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_SUMMARY_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_SUMMARY_KEY] = []


@pytest.fixture
def criterion(request):
    """Record a pass/fail line for an acceptance criterion."""
    lines = request.config.stash[_SUMMARY_KEY]

    def record(number, label, ok, detail=""):
        """``ok`` is True, False, or None for a criterion that was skipped."""
        verdict = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"criterion {number:>2} {verdict}  {label}" + (f"  ({detail})" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_SUMMARY_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
