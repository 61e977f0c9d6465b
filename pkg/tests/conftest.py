import pytest

from resultant_solve import build_template
from resultant_solve.problems import get_problem


@pytest.fixture(scope="session")
def conic_template():
    return build_template(get_problem("conic"), 7)


@pytest.fixture(scope="session")
def five_point_template():
    return build_template(get_problem("five_point"), 7)
