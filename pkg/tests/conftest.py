import numpy as np
import pytest

from itn_ensemble import CountryRecord, TradeSnapshot


def make_snapshot(weights, gdp=None, year=2000, codes=None):
    w = np.asarray(weights, dtype=float)
    n = w.shape[0]
    gdp = np.ones(n) if gdp is None else gdp
    codes = codes or [f"C{i}" for i in range(n)]
    return TradeSnapshot(year, [CountryRecord(c, year, float(g)) for c, g in zip(codes, gdp)], w)


@pytest.fixture
def snapshot4():
    w = np.array([
        [0.0, 5.0, 1.5, 0.0],
        [2.0, 0.0, 7.25, 0.5],
        [0.1, 3.0, 0.0, 9.0],
        [4.0, 0.0, 6.0, 0.0],
    ])
    return make_snapshot(w, gdp=[10.0, 3.5, 120.0, 0.75])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
