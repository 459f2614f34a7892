from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS.parent / "fixtures"
sys.path.insert(0, str(TESTS))

from ccq.textio import parse_database, parse_query  # noqa: E402

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def load(name: str):
    path = FIXTURES / name
    text = path.read_text()
    if name.endswith(".bdb"):
        return parse_database(text, str(path))
    return parse_query(text, str(path))


def fixture_queries():
    out = []
    for p in sorted(FIXTURES.glob("*.ccq")):
        if p.name == "bad.ccq":
            continue
        out.append(parse_query(p.read_text(), str(p)))
    return out


@pytest.fixture
def fx():
    return load


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail})")
