import pytest

from hddcrp.data import (
    load_synthetic_corpus,
    load_synthetic_resources,
    load_tiny_corpus,
)
from hddcrp.pairwise import train

# outcome of each acceptance criterion test, nodeid -> "passed"/"failed"
_acceptance_outcomes = {}


@pytest.fixture(scope="session")
def synthetic_corpus():
    return load_synthetic_corpus()


@pytest.fixture(scope="session")
def tiny_corpus():
    return load_tiny_corpus()


@pytest.fixture(scope="session")
def resources():
    return load_synthetic_resources()


@pytest.fixture(scope="session")
def trained_model(synthetic_corpus, resources):
    return train(synthetic_corpus, resources)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance_outcomes[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for nodeid in sorted(_acceptance_outcomes):
        name = nodeid.split("::")[-1]
        verdict = "PASS" if _acceptance_outcomes[nodeid] == "passed" else "FAIL"
        terminalreporter.write_line(f"  {verdict}  {name}")
