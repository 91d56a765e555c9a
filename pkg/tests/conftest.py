from fractions import Fraction

import numpy as np
import pytest

from elitist_chain import TriangularKernel

MATRIX_ONEMAX4 = [
    ["3/4", "1/2", 0, 0],
    [0, "1/2", "3/4", 0],
    [0, 0, "1/4", 1],
    [0, 0, 0, 0],
]

ACCEPTANCE_LINES = []


@pytest.fixture
def kernel4():
    return TriangularKernel.from_rows(MATRIX_ONEMAX4, exact=True)


@pytest.fixture
def kernel4f():
    return TriangularKernel.from_rows(MATRIX_ONEMAX4)


def random_exact_kernel(rng, L, diag_steps=16):
    """Valid kernel with diagonal gaps >= 1/diag_steps and Fraction entries.

    Diagonal entries are distinct multiples of 1/diag_steps in [0, 1); the
    leaving mass of each column is split by small integer weights between
    the states above it and the optimum.
    """
    diag = rng.choice(diag_steps, size=L, replace=False)
    r = np.empty((L, L), dtype=object)
    r.fill(Fraction(0))
    for j in range(L):
        d = Fraction(int(diag[j]), diag_steps)
        r[j, j] = d
        w = rng.integers(0, 4, size=j + 1)
        if w.sum() == 0:
            w[-1] = 1
        total = int(w.sum())
        for i in range(j):
            r[i, j] = (1 - d) * Fraction(int(w[i]), total)
    return TriangularKernel(r)


def random_problem_data(rng, L):
    """Positive nondecreasing errors, f_opt above them, and a start distribution."""
    e = sorted(Fraction(int(v), 8) for v in rng.integers(1, 40, size=L))
    f_opt = e[-1] + Fraction(int(rng.integers(0, 16)), 4)
    w = rng.integers(0, 5, size=L + 1)
    if w[:L].sum() == 0:
        w[L - 1] = 1
    q0 = [Fraction(int(v), int(w.sum())) for v in w[:L]]
    return e, f_opt, q0


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
