from __future__ import annotations

from pathlib import Path

import pytest

from oqr import ConceptStore, load_csv, load_mappings, load_ontology

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def ont():
    return load_ontology((FIXTURES / "hec.odf").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def reg(ont):
    return load_mappings((FIXTURES / "hec.omf").read_text(encoding="utf-8"), ont)


@pytest.fixture(scope="session")
def db(reg):
    return load_csv(FIXTURES, reg)


@pytest.fixture()
def store(ont, tmp_path):
    """A writable copy of the shipped concept store."""
    target = tmp_path / "concepts.dlq"
    target.write_text((FIXTURES / "concepts.dlq").read_text(encoding="utf-8"),
                      encoding="utf-8")
    return ConceptStore(target, ont)


@pytest.fixture(scope="session")
def shipped_store(ont):
    """Read-only view of the shipped store (no mutations in these tests)."""
    return ConceptStore(FIXTURES / "concepts.dlq", ont)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of every run."""
    lines = []
    for status, label in (("passed", "PASS"), ("failed", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance" in getattr(report, "nodeid", ""):
                name = report.nodeid.split("::")[-1]
                lines.append(f"ACCEPTANCE {name}: {label}")
    if lines:
        terminalreporter.write_line("")
        for line in sorted(lines):
            terminalreporter.write_line(line)
