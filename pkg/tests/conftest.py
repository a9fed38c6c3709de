import os

import pytest

TIER_B = os.environ.get("DPLINES_TIER_B") == "1"


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_collection_modifyitems(config, items):
    if TIER_B:
        return
    skip = pytest.mark.skip(reason="W(E7) run takes ~10 min; set DPLINES_TIER_B=1")
    for item in items:
        if "tier_b" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config._acceptance_lines
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def record(request):
    """Record one pass/fail line for the acceptance summary."""

    def _record(n, ok, detail):
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        line = f"criterion {n}: {status} {detail}"
        print(line)
        request.config._acceptance_lines.append(line)
        return ok

    return _record
