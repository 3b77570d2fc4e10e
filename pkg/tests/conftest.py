import pytest

from char2c import corpusforge


@pytest.fixture(scope="session")
def default_specs():
    return corpusforge.default_problem_specs()


@pytest.fixture(scope="session")
def small_corpus(default_specs):
    """4 problems x 8 samples; enough variety for metric and codec tests."""
    return corpusforge.generate_corpus(default_specs, 8, seed=11)


@pytest.fixture(scope="session")
def tiny_specs():
    return corpusforge.tiny_problem_specs()


@pytest.fixture(scope="session")
def tiny_corpus(tiny_specs):
    """2 problems x 20 one-line samples, codes under 120 chars."""
    return corpusforge.generate_corpus(tiny_specs, 20, seed=7)
