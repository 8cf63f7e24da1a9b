import pytest

from monoloc.arithmetic import golden, silver
from monoloc.potential import make_sawtooth
from monoloc.spectral import ids_build


@pytest.fixture(scope="session")
def gold():
    return golden()


@pytest.fixture(scope="session")
def silv():
    return silver()


@pytest.fixture(scope="session")
def saw20():
    return make_sawtooth(20)


@pytest.fixture(scope="session")
def ids20(gold, saw20):
    return ids_build(gold, saw20, 4181)
