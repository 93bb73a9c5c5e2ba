import pytest

from scatterlab.fields import make_tower, tower_for


@pytest.fixture(scope="session")
def t22():
    return make_tower(2, 1, 2)


@pytest.fixture(scope="session")
def t23():
    return make_tower(2, 1, 3)


@pytest.fixture(scope="session")
def t24():
    return make_tower(2, 1, 4)


@pytest.fixture(scope="session")
def t32():
    return tower_for(3, 2)
