import pytest

from floquet_lattice import DriveSpec, QubitParams
from reference_params import H_SUM, OMEGA_P, OMEGA_Z

_ACCEPTANCE_LINES = []


@pytest.fixture
def qubit():
    return QubitParams(OMEGA_Z)


@pytest.fixture
def drive():
    return DriveSpec(h_sum=H_SUM, alpha=0.0, cutoff_M=5, omega_p=OMEGA_P)


@pytest.fixture
def acceptance_report():
    """Collects one pass/fail line per acceptance check for the terminal summary."""

    def record(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {criterion}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
