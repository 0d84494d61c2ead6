import pytest

from steinbench import selfsim as ss


@pytest.fixture(scope="session")
def odometer():
    return ss.odometer()


@pytest.fixture(scope="session")
def grigorchuk():
    return ss.grigorchuk()


@pytest.fixture(scope="session")
def katsura():
    return ss.katsura()
