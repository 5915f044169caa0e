import pytest

from wholm import validate_problem


@pytest.fixture
def coincident_problem():
    # raw and weighted orderings agree, so both procedures match
    return validate_problem(["H1", "H2", "H3"], [0.01, 0.03, 0.09],
                            [1.0, 2.0, 3.0], 0.05)


@pytest.fixture
def divergent_problem():
    # the weighted ordering promotes H2 ahead of H1
    return validate_problem(["H1", "H2", "H3"], [0.01, 0.014, 0.3],
                            [1.0, 2.0, 3.0], 0.05)


@pytest.fixture
def ards_problem():
    return validate_problem(["H1", "H2", "H3", "H4"],
                            [0.024, 0.003, 0.026, 0.002],
                            [0.9, 0.1, 0.5, 0.5], 0.05)


@pytest.fixture
def diabetes_problem():
    return validate_problem(["H1", "H2", "H3", "H4", "H5", "H6"],
                            [0.011, 0.023, 0.006, 0.018, 0.042, 0.088],
                            [6.0, 6.0, 5.0, 4.0, 2.0, 1.0], 0.05)
