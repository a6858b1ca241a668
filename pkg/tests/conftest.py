import pytest

from hemicert.dim2 import build_F2


@pytest.fixture(scope="session")
def cf2():
    return build_F2()


@pytest.fixture(scope="session")
def cf2_appendix():
    return build_F2("appendix")
