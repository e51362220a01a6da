"""
Shared pytest fixtures; the builders live in memsgd.testing.
"""
import pytest

from memsgd.testing import fixtures


@pytest.fixture
def quadratic_problem():
    return fixtures.quadratic_problem()


@pytest.fixture
def logistic_problem():
    return fixtures.logistic_problem()


@pytest.fixture
def phaseret_problem():
    return fixtures.phaseret_problem()


@pytest.fixture
def run_config():
    return fixtures.run_config()
