import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def wp112():
    from qsdensity.toric import WP

    return WP((1, 1, 2), 3)


@pytest.fixture(scope="session")
def p2_f2():
    from qsdensity.toric import P

    return P(2, 2)
