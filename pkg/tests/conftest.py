import json
import pathlib

import pytest

from hbondvib.nf_solver import normal_form_spectrum
from hbondvib.surface import NormalFormCoefficients

GOLDEN = pathlib.Path(__file__).parent / "golden"

PAPER_NF = NormalFormCoefficients(0.26, 1.22, 1.29, 1.62)
UNIT_OSC = NormalFormCoefficients(0.5, 0.5, 0.0, 0.0)
MARGINAL = NormalFormCoefficients(1.0, 0.0, 2.0, 1.0)


def golden(name):
    with open(GOLDEN / name) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def paper_solution():
    return normal_form_spectrum(PAPER_NF, 40, 40, k=8)


@pytest.fixture(scope="session")
def unit_solution():
    return normal_form_spectrum(UNIT_OSC, 12, 12, k=10)


# criterion lines recorded by test_acceptance, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
