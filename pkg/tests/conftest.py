import pytest

from oracle import build_table


@pytest.fixture(scope="session")
def table40():
    return build_table(40)


@pytest.fixture(scope="session")
def table300():
    return build_table(300)
