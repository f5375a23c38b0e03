import pytest

from helpers import ACCEPTANCE, FIG2, cells_of, tol_of


@pytest.fixture
def fig2_cells():
    return cells_of(FIG2)


@pytest.fixture
def fig2_tol(fig2_cells):
    return tol_of(fig2_cells)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
