import numpy as np
import pytest
from hypothesis import settings

from cstar_povm import FinitePOVM, Tolerance
from cstar_povm.generators import trine_povm

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def tol():
    return Tolerance()


@pytest.fixture
def half():
    """The scalar POVM {0.5, 0.5} on C^1."""
    return FinitePOVM.from_effects([[[0.5]], [[0.5]]])


@pytest.fixture
def qubit_pvm():
    return FinitePOVM.from_effects([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])


@pytest.fixture
def trine():
    return trine_povm()


def random_psd(rng, d, rank=None):
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    return g @ g.conj().T


_ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Context manager recording a PASS/FAIL line for an acceptance criterion."""

    class _Record:
        def __init__(self, number, title):
            self.number = number
            self.title = title

        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            status = "PASS" if exc_type is None else "FAIL"
            _ACCEPTANCE[self.number] = f"criterion {self.number:>2} {status}  {self.title}"
            return False

    return _Record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[number])
