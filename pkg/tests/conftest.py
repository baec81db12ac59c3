import math

import pytest
from hypothesis import strategies as st

from coopjam.linalg2 import ComplexPair, Hermitian2
from coopjam.model import paper_instance, random_instance

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, finite, finite)
pairs = st.builds(ComplexPair, complexes, complexes)
hermitians = st.builds(Hermitian2, finite, finite, complexes)
nonzero_pairs = pairs.filter(lambda v: v.norm() > 1e-3)


@pytest.fixture(scope="session")
def paper():
    return paper_instance()


@pytest.fixture(params=range(6), ids=lambda s: f"seed{s}")
def small_instance(request):
    return random_instance(1 + request.param % 4, 100 + request.param)


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
