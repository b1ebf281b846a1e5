import re

import pytest
from hypothesis import HealthCheck, settings

from elgen.serialize import parse_ring

settings.register_profile(
    "elgen", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("elgen")

RINGS = {
    "Z": "order: x-1; invert: []",
    "Z[1/2]": "order: x-1; invert: [2]",
    "Z[1/6]": "order: x-1; invert: [2,3]",
    "Z[i]": "order: x^2+1; invert: []",
    "Z[sqrt2]": "order: x^2-2; invert: []",
    "Z[sqrt5]": "order: x^2-5; invert: []",
}


@pytest.fixture(scope="session")
def rings():
    return {name: parse_ring(text) for name, text in RINGS.items()}


_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_outcomes: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or report.outcome != "passed":
        label = f"criterion {int(m.group(1)):2d} ({m.group(2)})"
        prev = _outcomes.get(label, ("PASS", ""))[0]
        status = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _outcomes[label] = (status, report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes):
        terminalreporter.write_line(f"{_outcomes[label][0]}  {label}")
