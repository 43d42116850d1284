from __future__ import annotations

import pytest

from codedpir.code import paper_codes, parity_code, repetition_code
from codedpir.ratematrix import find_min_ratio


@pytest.fixture(scope="session")
def codes():
    return paper_codes()


@pytest.fixture(scope="session")
def C1(codes):
    return codes["C1"]


@pytest.fixture(scope="session")
def C2(codes):
    return codes["C2"]


@pytest.fixture(scope="session")
def rep2():
    return repetition_code(2)


@pytest.fixture(scope="session")
def spc3():
    return parity_code(3)


@pytest.fixture(scope="session")
def best_matrices(codes):
    """Minimal-ratio rate matrix for each example code."""
    return {name: find_min_ratio(code).matrix for name, code in codes.items()}
