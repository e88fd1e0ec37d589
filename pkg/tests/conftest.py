import math

import numpy as np
import pytest
from hypothesis import settings

from oscneg.spectral import build_correlation_frame, eigendecompose, symplectic_eigenvalues

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

HAND_H = np.array([[2.0, -1.0], [-1.0, 2.0]])
QUARTER_LN3 = 0.25 * math.log(3.0)


@pytest.fixture
def hand_frame():
    return eigendecompose(HAND_H)


@pytest.fixture
def hand_symp(hand_frame):
    return symplectic_eigenvalues(build_correlation_frame(hand_frame, [0]))


def random_frame(rng, n, coupling=None, k_max=8.0):
    """Anderson-type chain with random coupling and springs."""
    coupling = rng.uniform(0.2, 2.0) if coupling is None else coupling
    h = coupling * (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1))
    h[0, 0] -= coupling
    h[-1, -1] -= coupling
    h += np.diag(rng.uniform(0.1, k_max, n))
    return eigendecompose(h)


ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
