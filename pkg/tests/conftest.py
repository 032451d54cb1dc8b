from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    marker = dict(report.user_properties).get("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _acceptance[marker] = status


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            item.user_properties.append(("acceptance", m.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance.items():
        terminalreporter.write_line(f"{status:<4}  {name}")


@pytest.fixture
def fixture_corpus_path():
    return FIXTURES / "fixture_corpus.jsonl"
