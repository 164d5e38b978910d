import functools
from pathlib import Path

import pytest

from mpexpand.cli_io import read_coeff_csv

DATA = Path(__file__).parent / "data"
XI_CACHE = DATA / "xi_n260_b512.csv"

# lines reported by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES = {}


@functools.lru_cache(maxsize=1)
def xi_series():
    """Xi coefficients a_0..a_260 at 512 bits (quadrature, doubled-node check passed).

    Regenerate with:
    mpexpand coeffs --function xi --nmax 260 --bits 512 --verify -o tests/data/xi_n260_b512.csv
    """
    cs, _ = read_coeff_csv(XI_CACHE)
    return cs


@pytest.fixture(scope="session")
def xi():
    return xi_series()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
