import numpy as np
import pytest
from hypothesis import settings

from ctclab.linalg import make_rng

settings.register_profile("ctclab", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("ctclab")

# filled by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return make_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_hermitian(rng, d):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def assert_close(a, b, tol):
    diff = np.max(np.abs(np.asarray(a) - np.asarray(b)))
    assert diff <= tol, f"max deviation {diff:.3e} > {tol:.1e}"
