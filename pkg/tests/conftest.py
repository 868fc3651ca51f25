import numpy as np
import pytest

from stablesid import build_lowdim_example

#: one line per acceptance criterion, echoed after the run summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lowdim():
    return build_lowdim_example()


def random_spd(rng, n, spread=1.0):
    """Random symmetric positive definite matrix with eigenvalues >= 0.1."""
    Q = np.linalg.qr(rng.standard_normal((n, n)))[0]
    w = 0.1 + spread * rng.random(n)
    return (Q * w) @ Q.T


def random_stable(rng, n, rho=0.9):
    """Random matrix rescaled to the requested spectral radius."""
    A = rng.standard_normal((n, n))
    return A * (rho / np.abs(np.linalg.eigvals(A)).max())
