from __future__ import annotations

import pytest

from rmk.files import DATA, load_model
from rmk.lf_checker import check_signature
from rmk.lf_syntax import parse_signature


def load_sig(name: str):
    return check_signature(parse_signature((DATA / "corpus" / f"{name}.lfsig").read_text(encoding="utf-8")))


@pytest.fixture(scope="session")
def dtt():
    return load_sig("dtt")


@pytest.fixture(scope="session")
def pi_sig():
    return load_sig("pi")


@pytest.fixture(scope="session")
def subsingleton():
    from rmk.model import validate_model

    return validate_model(load_model(DATA / "subsingleton.model"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
