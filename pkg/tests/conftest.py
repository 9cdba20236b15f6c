from pathlib import Path

import pytest

from obdalab.logic import parse_data, parse_ontology, parse_query

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def example1():
    """(ontology, data, query) of the student-projects example."""
    return (
        parse_ontology((DATA / "example1.ont").read_text()),
        parse_data((DATA / "example1.data").read_text()),
        parse_query((DATA / "example1.query").read_text()),
    )


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
