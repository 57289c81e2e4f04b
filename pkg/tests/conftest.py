from pathlib import Path

import pytest

from aggrewrite.parser import parse

CORPUS = Path(__file__).parent / "corpus"

_acceptance_results = {}


def corpus_files(prefix=""):
    return sorted(CORPUS.glob(f"{prefix}*.lp"))


def load(name):
    program, diagnostics = parse((CORPUS / name).read_text())
    assert not [d for d in diagnostics if d.severity == "error"], diagnostics
    return program


def parse_ok(text):
    program, diagnostics = parse(text)
    assert not [d for d in diagnostics if d.severity == "error"], diagnostics
    return program


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _markers.get(report.nodeid)
    if marker is None:
        return
    number, title = marker
    previous = _acceptance_results.get(number, (title, True))
    _acceptance_results[number] = (title, previous[1] and report.outcome == "passed")


_markers = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            _markers[item.nodeid] = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance_results):
        title, ok = _acceptance_results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")


@pytest.fixture
def corpus():
    return CORPUS
