import os
from pathlib import Path

import pytest
from hypothesis import settings

import report
from gen import rng_for
from inqkit.modelfile import read_model

MODELS = Path(__file__).resolve().parent.parent / "models"

settings.register_profile("ci", max_examples=60, deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def rng():
    return rng_for(20240611)


@pytest.fixture(scope="session")
def models_dir():
    return MODELS


@pytest.fixture(scope="session")
def ex1():
    return read_model(str(MODELS / "ex1.model")).model


@pytest.fixture(scope="session")
def m1():
    return read_model(str(MODELS / "m1.model")).model


@pytest.fixture(scope="session")
def m2():
    return read_model(str(MODELS / "m2.model")).model


def pytest_terminal_summary(terminalreporter):
    if not report.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(report.LINES):
        terminalreporter.write_line(report.LINES[n])
