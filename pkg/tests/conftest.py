from collections import defaultdict

import pytest

from mlsamplesize import SplitSpec, StudyDesign

_criteria: dict[int, dict] = defaultdict(lambda: {"title": "", "passed": 0, "failed": []})

INVARIANT_CRITERION = 8
INVARIANT_TITLE = "property suites (every module invariant)"


@pytest.fixture
def worked_design() -> StudyDesign:
    """Binary diagnostic design: sens 0.85, spec 0.75, prevalence 0.2, 75:25 split, 95% CIs, d = 0.05."""
    return StudyDesign.binary_diagnostic(
        sens=0.85, spec=0.75, prevalence=0.20, precision=0.05, split=SplitSpec.ratio(3), confidence=0.95
    )


def _criterion_of(item):
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        return marker.args[0], marker.args[1]
    if item.get_closest_marker("invariant") is not None:
        return INVARIANT_CRITERION, INVARIANT_TITLE
    return None


def pytest_configure(config):
    config.addinivalue_line("markers", "invariant: property test counted toward the property-suite criterion")


def pytest_runtest_makereport(item, call):
    found = _criterion_of(item)
    if found is None:
        return
    number, title = found
    entry = _criteria[number]
    entry["title"] = entry["title"] or title
    if call.when == "call":
        if call.excinfo is None:
            entry["passed"] += 1
        else:
            entry["failed"].append(item.nodeid)
    elif call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception):
        entry["failed"].append(f"{item.nodeid} ({call.when})")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        status = "FAIL" if entry["failed"] else "PASS"
        terminalreporter.write_line(
            f"[{status}] criterion {number}: {entry['title']} ({entry['passed']} passed, {len(entry['failed'])} failed)"
        )
        for nodeid in entry["failed"]:
            terminalreporter.write_line(f"         failed: {nodeid}")
