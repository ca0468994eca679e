import io
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corrnet.synthetic import prices_from_returns, two_regime_returns, write_price_file  # noqa: E402

_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


@pytest.fixture
def price_text():
    def make(rows):
        return io.StringIO("date,symbol,close\n" + "".join(f"{r}\n" for r in rows))

    return make


@pytest.fixture(scope="session")
def regime_price_file(tmp_path_factory):
    """Two-regime synthetic prices for 8 symbols over 361 dates."""
    path = tmp_path_factory.mktemp("data") / "prices.csv"
    r = two_regime_returns(8, 360, 0.6, seed=11, symbols=[f"C{k}.F" for k in range(8)])
    with open(path, "w") as fh:
        write_price_file(prices_from_returns(r), fh)
    return path
