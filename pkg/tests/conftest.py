import pytest

from braideda import fibonacci_generators


@pytest.fixture(scope="session")
def gs():
    return fibonacci_generators()
